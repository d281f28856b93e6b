#include "vanetsim/aodv.hpp"
#include "vanetsim/dymo.hpp"
#include "vanetsim/olsr.hpp"
#include "vanetsim/zrp.hpp"

namespace vanetsim {

std::unique_ptr<RoutingAgent> make_agent(Protocol p, NodeServices& node, const RoutingParams& params) {
  switch (p) {
    case Protocol::Aodv: return std::make_unique<AodvAgent>(node, params);
    case Protocol::Dymo: return std::make_unique<DymoAgent>(node, params);
    case Protocol::Olsr: return std::make_unique<OlsrAgent>(node, params);
    case Protocol::Zrp: return std::make_unique<ZrpAgent>(node, params);
  }
  throw ContractViolation("make_agent: unknown protocol");
}

}  // namespace vanetsim
