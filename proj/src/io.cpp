#include "histopush/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "histopush/errors.hpp"

namespace histopush {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("json: ") + e.what());
    }
}

template <typename T>
T field(const json& j, const char* name) {
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("json field '") + name + "': " + e.what());
    }
}

}  // namespace

std::string serialize_net(const ReluNet& net) {
    json layers = json::array();
    for (const auto& l : net.layers) {
        json rows = json::array();
        for (int i = 0; i < l.out_dim(); ++i) {
            json row = json::array();
            for (int j = 0; j < l.in_dim(); ++j) row.push_back(l.matrix.at(i, j));
            rows.push_back(std::move(row));
        }
        layers.push_back(json{{"matrix", std::move(rows)}, {"bias", l.bias}});
    }
    return json{{"layers", std::move(layers)}}.dump();
}

ReluNet deserialize_net(const std::string& text) {
    const json j = parse(text);
    ReluNet net;
    const json layers = field<json>(j, "layers");
    if (!layers.is_array() || layers.empty()) throw ParseError("net: 'layers' must be a nonempty array");
    for (const auto& jl : layers) {
        const auto rows = field<std::vector<std::vector<double>>>(jl, "matrix");
        auto bias = field<std::vector<double>>(jl, "bias");
        Matrix m = Matrix::from_rows(rows);
        if (bias.size() != static_cast<std::size_t>(m.rows)) {
            throw DimensionMismatch("net: bias length does not match matrix rows");
        }
        if (!net.layers.empty() && net.layers.back().out_dim() != m.cols) {
            throw DimensionMismatch("net: consecutive layer dimensions do not match");
        }
        net.layers.push_back({std::move(m), std::move(bias)});
    }
    return net;
}

std::string serialize_histogram2d(const Histogram2D& h) {
    json rows = json::array();
    for (int k1 = 0; k1 < h.n; ++k1) {
        json row = json::array();
        for (int k2 = 0; k2 < h.n; ++k2) row.push_back(h.at(k1, k2));
        rows.push_back(std::move(row));
    }
    return json{{"n", h.n}, {"weights", std::move(rows)}}.dump();
}

Histogram2D deserialize_histogram2d(const std::string& text) {
    const json j = parse(text);
    return make_histogram2d_rows(field<int>(j, "n"), field<std::vector<std::vector<double>>>(j, "weights"));
}

std::string serialize_histogram1d(const Histogram1D& h) {
    return json{{"n", h.n}, {"weights", h.weights}}.dump();
}

Histogram1D deserialize_histogram1d(const std::string& text) {
    const json j = parse(text);
    return make_histogram1d(field<int>(j, "n"), field<std::vector<double>>(j, "weights"));
}

std::string serialize_pwl(const PiecewiseAffine& f) {
    return json{{"knots", f.knots}, {"values", f.values}}.dump();
}

PiecewiseAffine deserialize_pwl(const std::string& text) {
    const json j = parse(text);
    return make_pwl(field<std::vector<double>>(j, "knots"), field<std::vector<double>>(j, "values"));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("cannot write " + path);
}

}  // namespace histopush
