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
/**
 * @file
 * Dense pure-state simulator. Qubit 0 is the least significant bit of the
 * amplitude index; rotations follow R_P(theta) = exp(-i theta P / 2).
 */

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qfl {

using Complex = std::complex<double>;

enum class Axis { X, Y, Z };

char axis_name(Axis axis);

/// Largest register the simulator accepts.
inline constexpr std::size_t kMaxQubits = 20;

/// Row-major 2x2 complex matrix.
using Matrix2 = std::array<Complex, 4>;

class SingleQubitGate {
  public:
    enum class Label { RX, RY, RZ, Fixed };

    /// Arbitrary fixed gate; throws ArgumentError unless unitary within 1e-12.
    explicit SingleQubitGate(const Matrix2 &matrix);

    static SingleQubitGate rotation(Axis axis, double angle);
    static SingleQubitGate rx(double angle) { return rotation(Axis::X, angle); }
    static SingleQubitGate ry(double angle) { return rotation(Axis::Y, angle); }
    static SingleQubitGate rz(double angle) { return rotation(Axis::Z, angle); }

    [[nodiscard]] const Matrix2 &matrix() const { return matrix_; }
    [[nodiscard]] Label label() const { return label_; }

  private:
    SingleQubitGate(const Matrix2 &matrix, Label label)
        : matrix_(matrix), label_(label) {}

    Matrix2 matrix_;
    Label label_;
};

struct PauliObservable {
    Axis axis;
    std::size_t qubit;
};

class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits. Throws ConfigError outside [1, 20].
    explicit StateVector(std::size_t num_qubits);

    /// Takes ownership of explicit amplitudes; the length must be a power of
    /// two. No normalization is applied.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t num_qubits() const { return num_qubits_; }
    [[nodiscard]] std::size_t dimension() const { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const {
        return amplitudes_;
    }
    [[nodiscard]] const Complex &operator[](std::size_t index) const {
        return amplitudes_[index];
    }

    void apply_single(const SingleQubitGate &gate, std::size_t qubit);
    /// Same result as apply_single(SingleQubitGate::rotation(...)) with
    /// kernels specialised per axis.
    void apply_rotation(Axis axis, double angle, std::size_t qubit);
    void apply_cnot(std::size_t control, std::size_t target);
    /// Applies the bare Pauli matrix (not a rotation).
    void apply_pauli(Axis axis, std::size_t qubit);

    [[nodiscard]] double norm() const;

    friend bool operator==(const StateVector &, const StateVector &) = default;

  private:
    StateVector() = default;
    void check_qubit(std::size_t qubit) const;

    std::size_t num_qubits_{0};
    std::vector<Complex> amplitudes_;
};

StateVector zero_state(std::size_t num_qubits);

/// <a|b>
Complex inner_product(const StateVector &a, const StateVector &b);

/// <psi|P|psi>, in [-1, 1].
double expectation(const StateVector &state, const PauliObservable &obs);

/// Re<ab> - <a><b>. Same-qubit pairs must share the axis.
double pauli_covariance(const StateVector &state, const PauliObservable &a,
                        const PauliObservable &b);

/// Angle between the rays of `a` and `b`, in [0, pi/2]. Neither input needs
/// to be normalised.
double fubini_study_distance(const StateVector &a, const StateVector &b);

} // namespace qfl
