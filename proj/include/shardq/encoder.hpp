#pragma once

#include <map>
#include <string>
#include <vector>

#include "shardq/circuit.hpp"
#include "shardq/statevector.hpp"
#include "shardq/types.hpp"

namespace shardq {

// Forward transform carries the full 1/N factor; the plain butterfly is its
// inverse. Length must be a power of two.
std::vector<double> fwht_scaled(std::vector<double> v);
std::vector<double> fwht_unscaled(std::vector<double> v);

unsigned gray_code(unsigned i);
std::vector<unsigned> gray_sequence(int n_bits);
// out[k] = v[gray(k)]: step k of the circuit applies the coefficient
// addressed by gray(k).
std::vector<double> gray_permute(const std::vector<double>& v);
std::vector<double> gray_unpermute(const std::vector<double>& v);

struct AnglePayload {
    std::vector<double> data;  // address-major: data[i * n_data + j]
    int n_addr = 0;
    int n_data = 0;
    std::vector<double> raw_angles;                 // arccos image, same layout
    std::vector<std::vector<double>> final_angles;  // per data qubit, length 2^n_addr
    int clipped = 0;                                // inputs clipped into [-1,1]
};

struct EncoderLayout {
    std::vector<int> address_qubits;
    std::vector<int> data_qubits;
    std::vector<unsigned> gray_seq;
    std::vector<int> cx_control_schedule;  // control qubit after rotation k
};

EncoderLayout make_layout(int n_addr, int n_data);

AnglePayload data_to_angles(const std::vector<double>& data, int n_addr, int n_data);

// Inverse of the angle pipeline without any simulation.
std::vector<double> angles_to_data(const AnglePayload& payload);

// H on every address qubit, then per data qubit 2^n_addr repetitions of
// Ry(final angle) followed by the gray-scheduled CX, then MeasureZ on all
// qubits (clbit = qubit).
Circuit build_encoder_circuit(const AnglePayload& payload);

std::vector<double> decode_counts(const CountsTable& counts, int n_addr, int n_data);
std::vector<double> decode_weights(const std::map<std::string, double>& weights,
                                   int n_addr, int n_data);

// Debug export: one row per address with the raw and final angles per column.
std::string angles_to_csv(const AnglePayload& payload);

}  // namespace shardq
