#include "shardq/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shardq {

namespace {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void butterfly(std::vector<double>& v) {
    const std::size_t n = v.size();
    for (std::size_t half = 1; half < n; half <<= 1) {
        for (std::size_t start = 0; start < n; start += 2 * half) {
            for (std::size_t i = start; i < start + half; ++i) {
                double a = v[i], b = v[i + half];
                v[i] = a + b;
                v[i + half] = a - b;
            }
        }
    }
}

}  // namespace

std::vector<double> fwht_unscaled(std::vector<double> v) {
    if (!is_power_of_two(v.size()))
        throw std::invalid_argument("FWHT length must be a power of two");
    butterfly(v);
    return v;
}

std::vector<double> fwht_scaled(std::vector<double> v) {
    if (!is_power_of_two(v.size()))
        throw std::invalid_argument("FWHT length must be a power of two");
    butterfly(v);
    const double inv = 1.0 / static_cast<double>(v.size());
    for (double& x : v) x *= inv;
    return v;
}

unsigned gray_code(unsigned i) { return i ^ (i >> 1); }

std::vector<unsigned> gray_sequence(int n_bits) {
    std::vector<unsigned> seq(std::size_t(1) << n_bits);
    for (std::size_t i = 0; i < seq.size(); ++i)
        seq[i] = gray_code(static_cast<unsigned>(i));
    return seq;
}

std::vector<double> gray_permute(const std::vector<double>& v) {
    if (!is_power_of_two(v.size()))
        throw std::invalid_argument("length must be a power of two");
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        out[k] = v[gray_code(static_cast<unsigned>(k))];
    return out;
}

std::vector<double> gray_unpermute(const std::vector<double>& v) {
    if (!is_power_of_two(v.size()))
        throw std::invalid_argument("length must be a power of two");
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        out[gray_code(static_cast<unsigned>(k))] = v[k];
    return out;
}

EncoderLayout make_layout(int n_addr, int n_data) {
    if (n_addr < 1 || n_data < 1)
        throw std::invalid_argument("need at least one address and one data qubit");
    EncoderLayout layout;
    for (int a = 0; a < n_addr; ++a) layout.address_qubits.push_back(a);
    for (int d = 0; d < n_data; ++d) layout.data_qubits.push_back(n_addr + d);
    layout.gray_seq = gray_sequence(n_addr);
    const std::size_t n = layout.gray_seq.size();
    for (std::size_t k = 0; k < n; ++k) {
        unsigned flip = layout.gray_seq[k] ^ layout.gray_seq[(k + 1) % n];
        int bit = 0;
        while ((flip >> bit) != 1u) ++bit;  // flip is a single set bit
        layout.cx_control_schedule.push_back(n_addr - 1 - bit);
    }
    return layout;
}

AnglePayload data_to_angles(const std::vector<double>& data, int n_addr, int n_data) {
    const std::size_t n_addresses = std::size_t(1) << n_addr;
    if (data.size() != n_addresses * static_cast<std::size_t>(n_data))
        throw std::invalid_argument("data length must be 2^n_addr * n_data");
    AnglePayload p;
    p.n_addr = n_addr;
    p.n_data = n_data;
    p.data = data;
    for (double& x : p.data) {
        if (x > 1.0 || x < -1.0) {
            x = std::clamp(x, -1.0, 1.0);
            ++p.clipped;
        }
    }
    p.raw_angles.resize(p.data.size());
    for (std::size_t i = 0; i < p.data.size(); ++i)
        p.raw_angles[i] = std::acos(p.data[i]);
    for (int j = 0; j < n_data; ++j) {
        std::vector<double> column(n_addresses);
        for (std::size_t i = 0; i < n_addresses; ++i)
            column[i] = p.raw_angles[i * static_cast<std::size_t>(n_data) +
                                     static_cast<std::size_t>(j)];
        p.final_angles.push_back(gray_permute(fwht_scaled(column)));
    }
    return p;
}

std::vector<double> angles_to_data(const AnglePayload& payload) {
    const std::size_t n_addresses = std::size_t(1) << payload.n_addr;
    std::vector<double> out(n_addresses * static_cast<std::size_t>(payload.n_data));
    for (int j = 0; j < payload.n_data; ++j) {
        std::vector<double> raw =
            fwht_unscaled(gray_unpermute(payload.final_angles[static_cast<std::size_t>(j)]));
        for (std::size_t i = 0; i < n_addresses; ++i)
            out[i * static_cast<std::size_t>(payload.n_data) +
                static_cast<std::size_t>(j)] = std::cos(raw[i]);
    }
    return out;
}

Circuit build_encoder_circuit(const AnglePayload& payload) {
    EncoderLayout layout = make_layout(payload.n_addr, payload.n_data);
    const int nq = payload.n_addr + payload.n_data;
    Circuit c(nq, nq);
    for (int a : layout.address_qubits) c.add(GateOp::h(a));
    const std::size_t steps = layout.gray_seq.size();
    for (int j = 0; j < payload.n_data; ++j) {
        const int dq = layout.data_qubits[static_cast<std::size_t>(j)];
        const auto& angles = payload.final_angles[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < steps; ++k) {
            c.add(GateOp::ry(dq, angles[k]));
            c.add(GateOp::cx(layout.cx_control_schedule[k], dq));
        }
    }
    for (int q = 0; q < nq; ++q) c.add(GateOp::measure(q, q));
    return c;
}

namespace {

std::vector<double> decode_map(const std::map<std::string, double>& weights,
                               int n_addr, int n_data) {
    const std::size_t n_addresses = std::size_t(1) << n_addr;
    const std::size_t width = static_cast<std::size_t>(n_addr + n_data);
    std::vector<double> totals(n_addresses, 0.0);
    std::vector<std::vector<double>> ones(
        n_addresses, std::vector<double>(static_cast<std::size_t>(n_data), 0.0));
    for (const auto& [key, w] : weights) {
        if (key.size() != width)
            throw std::invalid_argument("bitstring width mismatch in decode");
        for (char ch : key)
            if (ch != '0' && ch != '1')
                throw std::invalid_argument("malformed bitstring in decode");
        std::size_t addr = index_of_bits(key.substr(0, static_cast<std::size_t>(n_addr)));
        double v = std::max(0.0, w);
        totals[addr] += v;
        for (int j = 0; j < n_data; ++j)
            if (key[static_cast<std::size_t>(n_addr + j)] == '1')
                ones[addr][static_cast<std::size_t>(j)] += v;
    }
    std::vector<double> data(n_addresses * static_cast<std::size_t>(n_data));
    for (std::size_t i = 0; i < n_addresses; ++i) {
        if (totals[i] <= 0.0)
            throw std::runtime_error("empty address bucket " + std::to_string(i) +
                                     " in decode");
        for (int j = 0; j < n_data; ++j) {
            double p1 = ones[i][static_cast<std::size_t>(j)] / totals[i];
            double p0 = 1.0 - p1;
            // atan2 keeps the p0 = 0 endpoint finite: theta = pi, data = -1.
            double theta = 2.0 * std::atan2(std::sqrt(std::max(0.0, p1)),
                                            std::sqrt(std::max(0.0, p0)));
            data[i * static_cast<std::size_t>(n_data) + static_cast<std::size_t>(j)] =
                std::cos(theta);
        }
    }
    return data;
}

}  // namespace

std::vector<double> decode_counts(const CountsTable& counts, int n_addr, int n_data) {
    std::map<std::string, double> weights;
    for (const auto& [k, v] : counts.counts) weights[k] = static_cast<double>(v);
    return decode_map(weights, n_addr, n_data);
}

std::vector<double> decode_weights(const std::map<std::string, double>& weights,
                                   int n_addr, int n_data) {
    return decode_map(weights, n_addr, n_data);
}

std::string angles_to_csv(const AnglePayload& payload) {
    std::ostringstream out;
    out.precision(17);
    out << "address";
    for (int j = 0; j < payload.n_data; ++j)
        out << ",raw_" << j << ",final_" << j;
    out << '\n';
    const std::size_t n_addresses = std::size_t(1) << payload.n_addr;
    for (std::size_t i = 0; i < n_addresses; ++i) {
        out << i;
        for (int j = 0; j < payload.n_data; ++j) {
            out << ',' << payload.raw_angles[i * static_cast<std::size_t>(payload.n_data) +
                                             static_cast<std::size_t>(j)];
            out << ',' << payload.final_angles[static_cast<std::size_t>(j)][i];
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace shardq
