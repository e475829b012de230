#pragma once

#include <string>

#include "json.hpp"

#include "roughw/rough_path.hpp"
#include "roughw/wentzell.hpp"

namespace roughw::io {

using nlohmann::json;

// Rough-path files: {"alpha", "horizon", "dim", "times", "values", "cum2"}
// with values one row per grid point and cum2 the row-major d*d tensor
// accumulated from time zero, matching the in-memory representation.
json rough_path_to_json(const RoughPath& p);
RoughPath rough_path_from_json(const json& j);
void save_rough_path(const RoughPath& p, const std::string& file);
RoughPath load_rough_path(const std::string& file);

json convergence_to_json(const ConvergenceReport& r);
json wentzell_report_to_json(const wentzell::WentzellReport& r);

// Controlled-path files: {"values", "gubinelli"} with gubinelli one row-major
// m*d block per grid point; the driver is supplied at load time.
json controlled_path_to_json(const ControlledPath& y);
ControlledPath controlled_path_from_json(const json& j, const RoughPath& driver);

// CSV with 17-significant-digit floats, one header line; columns as the
// columns of `table`.
void write_csv(const std::string& file, const std::vector<std::string>& header,
               const Mat& table);
std::string format_double(double v);

// FNV-1a over the canonical (sorted-key) dump, as a fixed-width hex string.
// The "out" key is dropped so a run's identity does not depend on where its
// artifacts land.
std::string config_hash(json config);

json load_json(const std::string& file);
void save_json(const json& j, const std::string& file);

}  // namespace roughw::io
