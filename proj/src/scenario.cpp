#include "mindgames/scenario.hpp"

#include <algorithm>
#include <cctype>

namespace mindgames {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

Scenario make(std::string id, std::string story, std::array<std::string, kAttributes> names,
              std::array<std::vector<std::string>, kAttributes> extra) {
  Scenario s{std::move(id), std::move(story), std::move(names), {}};
  for (int a = 0; a < kAttributes; ++a) {
    auto& kw = s.attribute_keywords[a];
    kw.push_back(lower(s.attribute_names[a]));
    for (auto& e : extra[a]) kw.push_back(lower(e));
    std::sort(kw.begin(), kw.end(), [](const auto& x, const auto& y) { return x.size() > y.size(); });
    kw.erase(std::unique(kw.begin(), kw.end()), kw.end());
  }
  return s;
}

}  // namespace

const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> registry = {
      make("llm",
           "Large language models (LLMs) could transform education, scientific discovery, and more. "
           "But if not developed and deployed with extreme care, they may pose significant risks to "
           "privacy, security, and human autonomy.",
           {"safety and control of LLMs", "development speed of LLMs", "public trust in LLMs"},
           {{{"safety and control"}, {"development speed"}, {"public trust"}}}),
      make("moon",
           "The stakes on the Moon have grown significantly in recent years. Lunar resources and "
           "technologies could determine the balance of power on Earth. But unrestrained development "
           "risks creating conflicts and environmental damage.",
           {"scientific advancement on the Moon", "commercial opportunities from lunar resources",
            "preservation of the lunar environment"},
           {{{"scientific advancement"}, {"commercial opportunities"}, {"lunar environment"}}}),
      make("ocean",
           "Recent technological advancements have made ocean energy more viable. These advancements "
           "create opportunities and challenges for coastal areas, attracting attention from "
           "environmental groups, energy companies, and coastal communities.",
           {"ocean energy production", "health of marine ecosystems",
            "economic benefits for coastal communities"},
           {{{"energy production"}, {"marine ecosystems"}, {"coastal communities", "economic benefits"}}}),
      make("education",
           "Technological advancements and changing workforce needs have sparked a nationwide debate on "
           "the effectiveness of the current education system. Student test results are declining, "
           "teachers are leaving the profession, and employers warn of a mismatch between graduate "
           "skills and workforce needs.",
           {"academic performance", "teacher satisfaction", "graduates' ability to meet workforce demands"},
           {{{"student achievement"}, {}, {"workforce demands"}}}),
      make("lunch",
           "A school is deciding whether to remove meat from its lunch menu. This change would address "
           "some animal welfare concerns and reduce food costs. However, it would also limit the variety "
           "of meal options available to students.",
           {"school budget", "student choice", "animal welfare"},
           {{{"budget"}, {}, {}}}),
  };
  return registry;
}

const std::vector<Scenario>& scenarios_e1() {
  static const std::vector<Scenario> registry = {
      make("llm-e1",
           "Large language models (LLMs) could transform education, scientific discovery, and more. "
           "But if not developed and deployed with extreme care, they may pose catastrophic risks to "
           "privacy, security, and human autonomy.",
           {"safety and control", "development speed", "public trust"}, {}),
      make("moon-e1",
           "The stakes on the Moon have grown significantly in recent years. Lunar resources and "
           "technologies could determine the balance of power on Earth. But unrestrained development "
           "risks turning the Moon into a conflict zone and ecological disaster. We must now decide on "
           "a development policy that will shape the future of lunar settlements.",
           {"scientific advancement", "commercial opportunities", "preservation of the lunar environment"},
           {{{}, {}, {"lunar environment"}}}),
      make("ocean-e1",
           "Recent technological advancements have made ocean energy more viable, attracting attention "
           "from environmental groups, energy companies, and coastal communities. We must now choose a "
           "development policy that will shape the future of the country's energy landscape. Their "
           "decision will have significant impacts.",
           {"energy production", "marine ecosystems", "coastal economies"}, {}),
      make("education-e1",
           "Rapid technological advancements and changing workforce needs have sparked a nationwide "
           "debate on the effectiveness of the current education system. Student test results are "
           "slipping, teachers are leaving the profession, and employers warn of a skills mismatch "
           "between graduates and workforce needs.",
           {"student achievement", "teacher satisfaction", "economic competitiveness"}, {}),
      make("lunch-e1",
           "A school is deciding whether to refrain from serving meat in the lunchroom. This decision "
           "will also save the school a lot of money.",
           {"cost to school", "student choice", "animal suffering"}, {}),
  };
  return registry;
}

const Scenario& find_scenario(std::string_view id) {
  for (const auto* reg : {&scenarios(), &scenarios_e1()})
    for (const auto& s : *reg)
      if (s.id == id) return s;
  throw Error(ErrorCode::kInvalidArgument, "unknown scenario: " + std::string(id));
}

}  // namespace mindgames
