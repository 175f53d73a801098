// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rbmducc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define RBMDUCC_DEFINE_ERROR(Name)                                            \
  class Name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

// integrals
RBMDUCC_DEFINE_ERROR(ParseError);
RBMDUCC_DEFINE_ERROR(IndexError);
RBMDUCC_DEFINE_ERROR(ConsistencyError);
RBMDUCC_DEFINE_ERROR(DegeneracyError);

// generators / qubit mapping
RBMDUCC_DEFINE_ERROR(InvalidGeneratorError);
RBMDUCC_DEFINE_ERROR(HermiticityError);

// simulator
RBMDUCC_DEFINE_ERROR(NonCommutingError);
RBMDUCC_DEFINE_ERROR(ArityError);

// ansatz
RBMDUCC_DEFINE_ERROR(AmbiguityError);
RBMDUCC_DEFINE_ERROR(SectorError);
RBMDUCC_DEFINE_ERROR(RankError);
RBMDUCC_DEFINE_ERROR(PairingError);

// rbm
RBMDUCC_DEFINE_ERROR(EmptyTrainingError);
RBMDUCC_DEFINE_ERROR(DivergenceError);

// vqe
RBMDUCC_DEFINE_ERROR(ModeError);

// oracle
RBMDUCC_DEFINE_ERROR(ResourceError);
RBMDUCC_DEFINE_ERROR(DimensionError);

// cli
RBMDUCC_DEFINE_ERROR(ConfigError);
RBMDUCC_DEFINE_ERROR(AssetError);

#undef RBMDUCC_DEFINE_ERROR

} // namespace rbmducc
