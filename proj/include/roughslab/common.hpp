// Copyright 2026 The roughslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace roughslab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kC0 = 299792458.0;             // m/s
inline constexpr double kMu0 = 1.25663706212e-6;       // H/m
inline constexpr double kEps0 = 8.8541878128e-12;      // F/m
inline constexpr double kEta0 = 376.730313668;         // ohm

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

inline double wavelength(double f_hz) { return kC0 / f_hz; }

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The FDTD time loop blew up.
class StabilityError : public Error {
public:
    StabilityError(const std::string& what, long step) : Error(what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

}  // namespace roughslab
