#pragma once

#include "xdw/warehouse.hpp"

#include <filesystem>
#include <memory>

namespace xdw::test {

inline std::filesystem::path data_dir() { return XDW_TEST_DATA; }

inline std::shared_ptr<const Warehouse> clapi_warehouse() {
  return std::make_shared<const Warehouse>(load_warehouse(data_dir() / "clapi"));
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string &tag);
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
};

} // namespace xdw::test

namespace xdw::test {

/// The clapi fixture with time-d extended by the location-group level
/// (begin, end -> extreme; middle -> middle), written in valid form.
inline std::shared_ptr<const Warehouse> grouped_warehouse() {
  Warehouse w = load_warehouse(data_dir() / "clapi");
  w.model = parse_model(read_file(data_dir() / "clapi_grouped" / "dw-model.xml"));
  DimensionData time = parse_dimension(read_file(data_dir() / "clapi_grouped" / "dim-time.xml"), w.model.dimensions[0]);
  for (auto &inst : time.levels[1].instances)
    if (inst.id == "middle") {
      inst.roll_up.reset();
      inst.drill_down = std::vector<std::string>{"middle"};
    }
  w.dimensions[0] = std::move(time);
  return std::make_shared<const Warehouse>(std::move(w));
}

} // namespace xdw::test
