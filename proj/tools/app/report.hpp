#pragma once
#include <string>
#include <vector>

#include <json.hpp>

namespace capdrop::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

std::string fmt(double x);  // %.17g, empty for NaN

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);
void write_json(const std::string& path, const Json& j);

// JSON number or null when not finite
Json num(double x);
Json num_array(const std::vector<double>& v);

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
};

struct PlotStyle {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool logy = false;
    bool equal_aspect = false;
};

void write_line_svg(const std::string& path, const std::vector<Series>& series, const PlotStyle& style);
void write_stem_svg(const std::string& path, const std::vector<double>& values, const PlotStyle& style);

}  // namespace capdrop::cli
