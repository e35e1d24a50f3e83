#include "fracdeg/testmaps.hpp"

namespace fracdeg {

std::shared_ptr<Mapping> make_test_map(const std::string& name, int dim) {
  if (name == "id") return std::make_shared<IdentityMap>(dim);
  if (name == "scale2") return std::make_shared<ScaleMap>(dim, 2.0);
  if (name == "reflect") return std::make_shared<ReflectionMap>(dim);
  if (name == "square") return std::make_shared<ComplexPowerMap>(2);
  if (name == "cube") return std::make_shared<ComplexPowerMap>(3);
  if (name == "zpow1") return std::make_shared<ComplexPowerMap>(1);
  if (name == "fold") return std::make_shared<SmoothedFoldMap>();
  if (name == "angle-double") return std::make_shared<AngleDoublingMap>();
  throw std::invalid_argument("unknown test map: " + name);
}

}  // namespace fracdeg
