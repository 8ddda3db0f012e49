// Textual tensor-field files. Format:
//   line 1:  symten v1
//   line 2:  n=<int> m=<int> grid=<N1>x<N2>[x<N3>]
//   then one line per node in row-major order (last axis fastest) with
//   dim_sym(n, m) decimal floats in sorted multi-index order.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "symten/decomp.hpp"
#include "symten/tensor.hpp"

namespace symten {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TensorFile {
    int n = 0, m = 0;
    std::vector<int> dims;
    std::vector<SymTensor<double>> vals; // row-major, last axis fastest
};

inline TensorFile read_tf(std::istream& in, const std::string& what = "<stream>") {
    auto fail = [&](const std::string& msg) -> TensorFile {
        throw IoError(what + ": " + msg);
    };
    std::string line;
    if (!std::getline(in, line) || line != "symten v1")
        return fail("expected header 'symten v1'");
    if (!std::getline(in, line)) return fail("missing size line");

    TensorFile tf;
    {
        std::istringstream ss(line);
        std::string tok;
        std::string grid;
        while (ss >> tok) {
            if (tok.rfind("n=", 0) == 0) tf.n = std::stoi(tok.substr(2));
            else if (tok.rfind("m=", 0) == 0) tf.m = std::stoi(tok.substr(2));
            else if (tok.rfind("grid=", 0) == 0) grid = tok.substr(5);
            else return fail("unrecognized token '" + tok + "' in size line");
        }
        if (tf.n < 1 || tf.m < 0 || grid.empty()) return fail("incomplete size line");
        std::istringstream gs(grid);
        std::string part;
        while (std::getline(gs, part, 'x')) {
            const int d = std::stoi(part);
            if (d < 2) return fail("grid axis must have >= 2 nodes");
            tf.dims.push_back(d);
        }
        if (tf.dims.empty() || tf.dims.size() > 3) return fail("grid must be 1-3 axes");
    }
    long long nodes = 1;
    for (int d : tf.dims) nodes *= d;
    const int comps = dim_sym(tf.n, tf.m);
    tf.vals.reserve(nodes);
    for (long long t = 0; t < nodes; ++t) {
        if (!std::getline(in, line)) return fail("unexpected end of file at node " + std::to_string(t));
        std::istringstream ss(line);
        SymTensor<double> v(tf.n, tf.m);
        for (int c = 0; c < comps; ++c)
            if (!(ss >> v[c]))
                return fail("node " + std::to_string(t) + ": expected " +
                            std::to_string(comps) + " values");
        double extra;
        if (ss >> extra) return fail("node " + std::to_string(t) + ": too many values");
        tf.vals.push_back(std::move(v));
    }
    return tf;
}

inline TensorFile read_tf_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    return read_tf(in, path);
}

inline void write_tf(std::ostream& out, const TensorFile& tf) {
    out << "symten v1\n";
    out << "n=" << tf.n << " m=" << tf.m << " grid=";
    for (std::size_t a = 0; a < tf.dims.size(); ++a) {
        if (a) out << 'x';
        out << tf.dims[a];
    }
    out << '\n';
    const int comps = dim_sym(tf.n, tf.m);
    char buf[64];
    for (const auto& v : tf.vals) {
        for (int c = 0; c < comps; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", v[c]);
            out << (c ? " " : "") << buf;
        }
        out << '\n';
    }
}

inline void write_tf_file(const std::string& path, const TensorFile& tf) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    write_tf(out, tf);
    if (!out) throw IoError(path + ": write failed");
}

inline GridField to_grid(const TensorFile& tf) {
    if (tf.n != 2 || tf.dims.size() != 2 || tf.dims[0] != tf.dims[1])
        throw IoError("grid fields require n=2 and a square 2-axis grid");
    GridField g(tf.dims[0], tf.m);
    if (tf.vals.size() != g.vals.size()) throw IoError("node count mismatch");
    g.vals = tf.vals;
    return g;
}

inline TensorFile from_grid(const GridField& g) {
    TensorFile tf;
    tf.n = 2;
    tf.m = g.rank;
    tf.dims = {g.N, g.N};
    tf.vals = g.vals;
    return tf;
}

} // namespace symten
