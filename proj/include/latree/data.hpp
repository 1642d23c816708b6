#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace latree {

/// n x (o * l_max) sample matrix over observed nodes. Sample j of node i,
/// coordinate s (0-based) lives at row j, column i*l_max + s.
struct DataMatrix {
    int n = 0;
    int o = 0;
    int l_max = 1;
    Eigen::MatrixXd values;

    int cols() const { return o * l_max; }
    int col_index(int node, int coord) const { return node * l_max + coord; }

    static DataMatrix zeros(int n, int o, int l_max) {
        DataMatrix d;
        d.n = n;
        d.o = o;
        d.l_max = l_max;
        d.values = Eigen::MatrixXd::Zero(n, o * l_max);
        return d;
    }

    DataMatrix head_rows(int rows) const {
        if (rows < 0 || rows > n) throw std::invalid_argument("head_rows: bad row count");
        DataMatrix out;
        out.n = rows;
        out.o = o;
        out.l_max = l_max;
        out.values = values.topRows(rows);
        return out;
    }
};

inline void write_data_csv(const DataMatrix& d, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    for (int i = 0; i < d.o; ++i)
        for (int s = 0; s < d.l_max; ++s)
            f << (i || s ? "," : "") << "node_" << i << "_coord_" << (s + 1);
    f << "\n";
    char buf[40];
    for (int r = 0; r < d.n; ++r) {
        for (int c = 0; c < d.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", d.values(r, c));
            if (c) f << ',';
            f << buf;
        }
        f << "\n";
    }
}

inline DataMatrix read_data_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string header;
    if (!std::getline(f, header)) throw std::runtime_error(path + ": empty file");
    int cols = 0, max_node = -1, max_coord = 0;
    {
        std::stringstream ss(header);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            int node = -1, coord = -1;
            if (std::sscanf(tok.c_str(), "node_%d_coord_%d", &node, &coord) != 2)
                throw std::runtime_error(path + ": bad header token '" + tok + "'");
            max_node = std::max(max_node, node);
            max_coord = std::max(max_coord, coord);
            ++cols;
        }
    }
    const int o = max_node + 1, l_max = max_coord;
    if (cols != o * l_max) throw std::runtime_error(path + ": header not dense");
    std::vector<double> vals;
    std::string line;
    int rows = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        int c = 0;
        while (std::getline(ss, tok, ',')) {
            vals.push_back(std::strtod(tok.c_str(), nullptr));
            ++c;
        }
        if (c != cols) throw std::runtime_error(path + ": ragged row");
        ++rows;
    }
    DataMatrix d = DataMatrix::zeros(rows, o, l_max);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) d.values(r, c) = vals[r * cols + c];
    return d;
}

/// Raw format: uint32 n, uint32 cols (little endian), then row-major f64.
inline void write_data_binary(const DataMatrix& d, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    const std::uint32_t n = static_cast<std::uint32_t>(d.n);
    const std::uint32_t c = static_cast<std::uint32_t>(d.cols());
    f.write(reinterpret_cast<const char*>(&n), 4);
    f.write(reinterpret_cast<const char*>(&c), 4);
    for (int r = 0; r < d.n; ++r)
        for (int j = 0; j < d.cols(); ++j) {
            const double v = d.values(r, j);
            f.write(reinterpret_cast<const char*>(&v), 8);
        }
}

inline DataMatrix read_data_binary(const std::string& path, int l_max) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::uint32_t n = 0, cols = 0;
    f.read(reinterpret_cast<char*>(&n), 4);
    f.read(reinterpret_cast<char*>(&cols), 4);
    if (!f) throw std::runtime_error(path + ": truncated header");
    if (l_max <= 0 || cols % static_cast<std::uint32_t>(l_max) != 0)
        throw std::runtime_error(path + ": column count not divisible by l_max");
    DataMatrix d = DataMatrix::zeros(static_cast<int>(n), static_cast<int>(cols) / l_max, l_max);
    for (std::uint32_t r = 0; r < n; ++r)
        for (std::uint32_t j = 0; j < cols; ++j) {
            double v;
            f.read(reinterpret_cast<char*>(&v), 8);
            if (!f) throw std::runtime_error(path + ": truncated data");
            d.values(r, j) = v;
        }
    return d;
}

}  // namespace latree
