#ifndef GBTSVM_ALL_HPP
#define GBTSVM_ALL_HPP

#include "gbtsvm/dataset.hpp"
#include "gbtsvm/error.hpp"
#include "gbtsvm/evaluation.hpp"
#include "gbtsvm/gbtsvm.hpp"
#include "gbtsvm/granulation.hpp"
#include "gbtsvm/io.hpp"
#include "gbtsvm/kernels.hpp"
#include "gbtsvm/lsgbtsvm.hpp"
#include "gbtsvm/numerics.hpp"
#include "gbtsvm/pipeline.hpp"
#include "gbtsvm/twin_model.hpp"
#include "gbtsvm/vtub.hpp"

#endif  // GBTSVM_ALL_HPP
