#include "gnnerator/hardware_config.hpp"

#include "gnnerator/errors.hpp"

namespace gnnerator {

void DramConfig::validate() const {
  if (bytes_per_cycle < 1) throw ConfigError("dram.bytes_per_cycle must be >= 1");
  if (!(clock_ghz > 0.0)) throw ConfigError("dram.clock_ghz must be > 0");
}

void HardwareConfig::validate() const {
  dense.validate();
  graph.validate();
  dram.validate();
}

}  // namespace gnnerator
