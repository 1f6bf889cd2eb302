#include "volterra/kernel_json.hpp"

#include <stdexcept>

namespace volterra {

using nlohmann::ordered_json;

ordered_json kernel_to_json(const Kernel& kernel) {
    ordered_json doc;
    doc["kind"] = to_string(kernel.kind());
    doc["k"] = kernel.arity();
    doc["alpha"] = kernel.alpha();
    ordered_json params = ordered_json::object();
    switch (kernel.kind()) {
        case KernelKind::PowerSum:
            break;
        case KernelKind::ProductPower:
            params["gamma"] = kernel.exponents();
            break;
        case KernelKind::RatioForm:
            params["a"] = kernel.exponents();
            params["b"] = kernel.ratio_b();
            break;
        case KernelKind::Scale:
            params["c"] = kernel.scale_factor();
            break;
        case KernelKind::Perturbed:
            params["c"] = kernel.perturbation().c;
            params["delta"] = kernel.perturbation().delta;
            break;
        case KernelKind::Sum:
        case KernelKind::Max:
        case KernelKind::Min:
            break;
    }
    doc["params"] = params;
    ordered_json children = ordered_json::array();
    for (const auto& child : kernel.children())
        children.push_back(kernel_to_json(child));
    doc["children"] = children;
    return doc;
}

Kernel kernel_from_json(const ordered_json& doc) {
    const auto kind = kernel_kind_from_string(doc.at("kind").get<std::string>());
    const int k = doc.at("k").get<int>();
    const double alpha = doc.at("alpha").get<double>();
    const auto& params = doc.at("params");
    std::vector<Kernel> children;
    if (doc.contains("children"))
        for (const auto& child : doc.at("children"))
            children.push_back(kernel_from_json(child));
    Kernel out = [&]() {
        switch (kind) {
            case KernelKind::PowerSum:
                return Kernel::power_sum(k, alpha);
            case KernelKind::ProductPower:
                return Kernel::product_power(
                    params.at("gamma").get<std::vector<double>>());
            case KernelKind::RatioForm:
                return Kernel::ratio_form(
                    params.at("a").get<std::vector<double>>(),
                    params.at("b").get<double>());
            case KernelKind::Scale:
                if (children.size() != 1)
                    throw std::invalid_argument("scale: exactly one child");
                return Kernel::scale(params.at("c").get<double>(),
                                     std::move(children[0]));
            case KernelKind::Sum:
                return Kernel::sum_of(std::move(children));
            case KernelKind::Max:
                return Kernel::max_of(std::move(children));
            case KernelKind::Min:
                return Kernel::min_of(std::move(children));
            case KernelKind::Perturbed:
                if (children.size() != 1)
                    throw std::invalid_argument("perturbed: exactly one child");
                return Kernel::perturbed(
                    std::move(children[0]),
                    Perturbation{params.at("c").get<double>(),
                                 params.at("delta").get<double>()});
        }
        throw std::logic_error("unreachable");
    }();
    if (out.arity() != k)
        throw std::invalid_argument("kernel document: arity mismatch");
    return out;
}

std::string kernel_to_string(const Kernel& kernel) {
    return kernel_to_json(kernel).dump();
}

Kernel kernel_from_string(const std::string& text) {
    return kernel_from_json(ordered_json::parse(text));
}

}  // namespace volterra
