// Copyright 2026 The QFL Authors.
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

#include "qfl/state_vector.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "qfl/error.hpp"

namespace qfl {

namespace {

constexpr Complex kI{0.0, 1.0};

bool is_unitary(const Matrix2 &m, double tol) {
    // Columns orthonormal <=> U^dagger U = I.
    const Complex c00 = std::conj(m[0]) * m[0] + std::conj(m[2]) * m[2];
    const Complex c11 = std::conj(m[1]) * m[1] + std::conj(m[3]) * m[3];
    const Complex c01 = std::conj(m[0]) * m[1] + std::conj(m[2]) * m[3];
    return std::abs(c00 - 1.0) <= tol && std::abs(c11 - 1.0) <= tol &&
           std::abs(c01) <= tol;
}

void require_same_register(const StateVector &a, const StateVector &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw ArgumentError("state registers differ: " +
                            std::to_string(a.num_qubits()) + " vs " +
                            std::to_string(b.num_qubits()) + " qubits");
    }
}

} // namespace

char axis_name(Axis axis) {
    switch (axis) {
    case Axis::X:
        return 'X';
    case Axis::Y:
        return 'Y';
    case Axis::Z:
        return 'Z';
    }
    return '?';
}

SingleQubitGate::SingleQubitGate(const Matrix2 &matrix)
    : matrix_(matrix), label_(Label::Fixed) {
    if (!is_unitary(matrix, 1e-12)) {
        throw ArgumentError("gate matrix is not unitary");
    }
}

SingleQubitGate SingleQubitGate::rotation(Axis axis, double angle) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    switch (axis) {
    case Axis::X:
        return {Matrix2{c, -kI * s, -kI * s, c}, Label::RX};
    case Axis::Y:
        return {Matrix2{c, -s, s, c}, Label::RY};
    case Axis::Z:
        return {Matrix2{Complex{c, -s}, 0.0, 0.0, Complex{c, s}}, Label::RZ};
    }
    throw ArgumentError("unknown rotation axis");
}

StateVector::StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw ConfigError("qubit count must be in [1, " +
                          std::to_string(kMaxQubits) + "], got " +
                          std::to_string(num_qubits));
    }
    amplitudes_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
    amplitudes_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
    const std::size_t dim = amplitudes.size();
    if (dim < 2 || (dim & (dim - 1)) != 0) {
        throw ArgumentError("amplitude count must be a power of two >= 2, got " +
                            std::to_string(dim));
    }
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    if (n > kMaxQubits) {
        throw ConfigError("register larger than " + std::to_string(kMaxQubits) +
                          " qubits");
    }
    StateVector state;
    state.num_qubits_ = n;
    state.amplitudes_ = std::move(amplitudes);
    return state;
}

void StateVector::check_qubit(std::size_t qubit) const {
    if (qubit >= num_qubits_) {
        throw IndexError("qubit " + std::to_string(qubit) +
                         " out of range for " + std::to_string(num_qubits_) +
                         "-qubit register");
    }
}

void StateVector::apply_single(const SingleQubitGate &gate, std::size_t qubit) {
    check_qubit(qubit);
    const auto &m = gate.matrix();
    const std::size_t stride = std::size_t{1} << qubit;
    const std::size_t dim = amplitudes_.size();
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t k = block; k < block + stride; ++k) {
            const Complex a0 = amplitudes_[k];
            const Complex a1 = amplitudes_[k + stride];
            amplitudes_[k] = m[0] * a0 + m[1] * a1;
            amplitudes_[k + stride] = m[2] * a0 + m[3] * a1;
        }
    }
}

void StateVector::apply_rotation(Axis axis, double angle, std::size_t qubit) {
    check_qubit(qubit);
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    const std::size_t stride = std::size_t{1} << qubit;
    const std::size_t dim = amplitudes_.size();
    Complex *amp = amplitudes_.data();
    switch (axis) {
    case Axis::X:
        for (std::size_t block = 0; block < dim; block += 2 * stride) {
            for (std::size_t k = block; k < block + stride; ++k) {
                const Complex a0 = amp[k];
                const Complex a1 = amp[k + stride];
                // c*a0 - i*s*a1, -i*s*a0 + c*a1
                amp[k] = {c * a0.real() + s * a1.imag(),
                          c * a0.imag() - s * a1.real()};
                amp[k + stride] = {s * a0.imag() + c * a1.real(),
                                   -s * a0.real() + c * a1.imag()};
            }
        }
        break;
    case Axis::Y:
        for (std::size_t block = 0; block < dim; block += 2 * stride) {
            for (std::size_t k = block; k < block + stride; ++k) {
                const Complex a0 = amp[k];
                const Complex a1 = amp[k + stride];
                amp[k] = c * a0 - s * a1;
                amp[k + stride] = s * a0 + c * a1;
            }
        }
        break;
    case Axis::Z: {
        const Complex lo{c, -s};
        const Complex hi{c, s};
        for (std::size_t block = 0; block < dim; block += 2 * stride) {
            for (std::size_t k = block; k < block + stride; ++k) {
                amp[k] *= lo;
                amp[k + stride] *= hi;
            }
        }
        break;
    }
    }
}

void StateVector::apply_cnot(std::size_t control, std::size_t target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
        throw ArgumentError("CNOT control and target must differ (both " +
                            std::to_string(control) + ")");
    }
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        if ((i & cmask) != 0 && (i & tmask) == 0) {
            std::swap(amplitudes_[i], amplitudes_[i | tmask]);
        }
    }
}

void StateVector::apply_pauli(Axis axis, std::size_t qubit) {
    check_qubit(qubit);
    const std::size_t stride = std::size_t{1} << qubit;
    const std::size_t dim = amplitudes_.size();
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t k = block; k < block + stride; ++k) {
            Complex &a0 = amplitudes_[k];
            Complex &a1 = amplitudes_[k + stride];
            switch (axis) {
            case Axis::X:
                std::swap(a0, a1);
                break;
            case Axis::Y: {
                const Complex t = a0;
                a0 = -kI * a1;
                a1 = kI * t;
                break;
            }
            case Axis::Z:
                a1 = -a1;
                break;
            }
        }
    }
}

double StateVector::norm() const {
    double sum = 0.0;
    for (const auto &a : amplitudes_) {
        sum += std::norm(a);
    }
    return std::sqrt(sum);
}

StateVector zero_state(std::size_t num_qubits) {
    return StateVector(num_qubits);
}

Complex inner_product(const StateVector &a, const StateVector &b) {
    require_same_register(a, b);
    Complex sum{0.0, 0.0};
    const auto lhs = a.amplitudes();
    const auto rhs = b.amplitudes();
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        sum += std::conj(lhs[i]) * rhs[i];
    }
    return sum;
}

double expectation(const StateVector &state, const PauliObservable &obs) {
    if (obs.qubit >= state.num_qubits()) {
        throw IndexError("observable qubit " + std::to_string(obs.qubit) +
                         " out of range");
    }
    const auto amp = state.amplitudes();
    const std::size_t stride = std::size_t{1} << obs.qubit;
    double sum = 0.0;
    for (std::size_t block = 0; block < amp.size(); block += 2 * stride) {
        for (std::size_t k = block; k < block + stride; ++k) {
            const Complex a0 = amp[k];
            const Complex a1 = amp[k + stride];
            switch (obs.axis) {
            case Axis::X:
                sum += 2.0 * (std::conj(a0) * a1).real();
                break;
            case Axis::Y:
                sum += 2.0 * (std::conj(a0) * a1).imag();
                break;
            case Axis::Z:
                sum += std::norm(a0) - std::norm(a1);
                break;
            }
        }
    }
    return sum;
}

double pauli_covariance(const StateVector &state, const PauliObservable &a,
                        const PauliObservable &b) {
    if (a.qubit >= state.num_qubits() || b.qubit >= state.num_qubits()) {
        throw IndexError("observable qubit out of range");
    }
    if (a.qubit == b.qubit && a.axis != b.axis) {
        throw UnsupportedPairingError(
            std::string("non-commuting pair ") + axis_name(a.axis) +
            axis_name(b.axis) + " on qubit " + std::to_string(a.qubit));
    }
    StateVector pa = state;
    pa.apply_pauli(a.axis, a.qubit);
    StateVector pb = state;
    pb.apply_pauli(b.axis, b.qubit);
    const Complex joint = inner_product(pa, pb);
    const Complex ea = inner_product(state, pa);
    const Complex eb = inner_product(state, pb);
    assert(std::abs(ea.imag()) < 1e-12 && std::abs(eb.imag()) < 1e-12);
    return joint.real() - ea.real() * eb.real();
}

double fubini_study_distance(const StateVector &a, const StateVector &b) {
    require_same_register(a, b);
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw ArgumentError("Fubini-Study distance undefined for zero vector");
    }
    const Complex overlap = inner_product(a, b) / (na * nb);
    const double cos_gamma = std::abs(overlap);
    // sin(gamma) is the norm of the part of b orthogonal to a. Computing it
    // directly keeps the distance accurate near zero where acos is not.
    const auto amp_a = a.amplitudes();
    const auto amp_b = b.amplitudes();
    double orth = 0.0;
    for (std::size_t i = 0; i < amp_a.size(); ++i) {
        orth += std::norm(amp_b[i] / nb - (amp_a[i] / na) * overlap);
    }
    return std::atan2(std::sqrt(orth), cos_gamma);
}

} // namespace qfl
