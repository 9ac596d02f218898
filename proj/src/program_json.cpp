#include <json.hpp>

#include "qram/program.hpp"

namespace qram {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json op_to_json(const LayeredOp& op) {
    ordered_json j;
    j["type"] = to_string(op.type);
    switch (op.type) {
        case OpType::AddressBusInput:
            j["digit"] = op.index;
            break;
        case OpType::DataBusInput:
            j["digit"] = op.index;
            j["dir"] = to_string(op.bus_dir);
            break;
        case OpType::ControlledDataBusInput:
            j["digit"] = op.index;
            j["high"] = op.high;
            j["dir"] = to_string(op.bus_dir);
            break;
        case OpType::Routing:
            j["layer"] = op.index;
            j["dir"] = to_string(op.dir);
            break;
        case OpType::InternalSwap:
            j["layer"] = op.index;
            break;
        case OpType::DataCopy:
            j["digit"] = op.index;
            j["high"] = op.high;
            break;
    }
    return j;
}

LayeredOp op_from_json(const ordered_json& j) {
    const std::string type = j.at("type");
    if (type == "address_bus_input") return LayeredOp::address_input(j.at("digit"));
    if (type == "data_bus_input") {
        std::string d = j.at("dir");
        return LayeredOp::data_input(j.at("digit"), d == "in" ? BusDir::In : BusDir::Out);
    }
    if (type == "controlled_data_bus_input") {
        std::string d = j.at("dir");
        return LayeredOp::controlled_data_input(j.at("digit"), j.at("high"),
                                                d == "in" ? BusDir::In : BusDir::Out);
    }
    if (type == "routing") {
        std::string d = j.at("dir");
        RouteDir dir = d == "down" ? RouteDir::Down : d == "up" ? RouteDir::Up : RouteDir::Bi;
        if (d != "down" && d != "up" && d != "bi")
            throw std::invalid_argument("bad routing dir: " + d);
        return LayeredOp::routing(j.at("layer"), dir);
    }
    if (type == "internal_swap") return LayeredOp::internal_swap(j.at("layer"));
    if (type == "data_copy") return LayeredOp::data_copy(j.at("digit"), j.value("high", 0));
    throw std::invalid_argument("unknown op type: " + type);
}

Phase phase_from_string(const std::string& s) {
    if (s == "address_setting") return Phase::AddressSetting;
    if (s == "data_fetch") return Phase::DataFetch;
    if (s == "uncomputing") return Phase::Uncomputing;
    throw std::invalid_argument("unknown phase: " + s);
}

}  // namespace

std::string program_to_json(const Program& program, int indent) {
    ordered_json j;
    j["version"] = 1;
    j["n"] = program.spec.n;
    j["k"] = program.spec.k;
    j["scheme"] = to_string(program.spec.scheme);
    j["protocol"] = program.protocol;
    j["bandwidth"] = program.spec.bandwidth;
    j["m"] = program.m;
    j["steps"] = ordered_json::array();
    for (const TimeStep& step : program.steps) {
        ordered_json js;
        js["phase"] = to_string(step.phase);
        js["ops"] = ordered_json::array();
        for (const LayeredOp& op : step.ops) js["ops"].push_back(op_to_json(op));
        j["steps"].push_back(std::move(js));
    }
    return j.dump(indent) + "\n";
}

Program program_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (j.at("version").get<int>() != 1) throw std::invalid_argument("unsupported program version");
    Program p;
    p.spec.n = j.at("n");
    p.spec.k = j.at("k");
    p.spec.scheme = scheme_from_string(j.at("scheme"));
    p.spec.bandwidth = j.at("bandwidth");
    p.m = j.at("m");
    p.protocol = j.at("protocol");
    for (const auto& js : j.at("steps")) {
        TimeStep step;
        step.phase = phase_from_string(js.at("phase"));
        for (const auto& jo : js.at("ops")) step.ops.push_back(op_from_json(jo));
        p.steps.push_back(std::move(step));
    }
    return p;
}

}  // namespace qram
