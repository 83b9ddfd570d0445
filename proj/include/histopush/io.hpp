#pragma once

#include <string>

#include "histopush/histogram.hpp"
#include "histopush/pwl.hpp"
#include "histopush/relunet.hpp"

namespace histopush {

// Text interchange formats. Doubles are emitted with the shortest
// representation that round-trips exactly, so serialize/deserialize is
// bit-exact and output is byte-stable.

std::string serialize_net(const ReluNet& net);
ReluNet deserialize_net(const std::string& text);

std::string serialize_histogram2d(const Histogram2D& h);
Histogram2D deserialize_histogram2d(const std::string& text);

std::string serialize_histogram1d(const Histogram1D& h);
Histogram1D deserialize_histogram1d(const std::string& text);

std::string serialize_pwl(const PiecewiseAffine& f);
PiecewiseAffine deserialize_pwl(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace histopush
