#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "apidomain/common/error.hpp"
#include "apidomain/common/text.hpp"

namespace apidomain {

/// The closed set of API-domain labels.
enum class ApiDomain : std::uint8_t {
  App, APM, BigData, Cloud, CG, DataStructure, DB, DevOps, ErrorHandling, EventHandling,
  GIS, IO, Interpreter, I18n, Logic, Lang, Logging, ML, Microservices, Multimedia,
  Thread, NLP, Network, OS, Parser, Search, Security, Setup, UI, Util, Test,
};

inline constexpr std::size_t kDomainCount = 31;

struct DomainInfo {
  ApiDomain domain;
  std::string_view name;          // short label, as used in datasets
  std::string_view display_name;  // long form; its words are embedded
  std::string_view definition;
};

inline constexpr std::array<DomainInfo, kDomainCount> kDomains{{
    {ApiDomain::App, "App", "Application", "Third-party apps or plugins for specific use attached to the System"},
    {ApiDomain::APM, "APM", "Application Performance Manager", "Monitors performance or benchmark"},
    {ApiDomain::BigData, "BigData", "Big Data", "APIs that deal with storing large amount of data, with variety of formats"},
    {ApiDomain::Cloud, "Cloud", "Cloud", "APIs for software and services that run on the Internet"},
    {ApiDomain::CG, "CG", "Computer Graphics", "Manipulating visual content"},
    {ApiDomain::DataStructure, "DataStructure", "Data Structure", "Data structures patterns (e.g., collections, lists, trees)"},
    {ApiDomain::DB, "DB", "Databases", "Databases or metadata"},
    {ApiDomain::DevOps, "DevOps", "Software Development and IT Operations", "Libraries for version control, continuous integration and continuous delivery"},
    {ApiDomain::ErrorHandling, "ErrorHandling", "Error Handling", "Response and recovery procedures from error conditions"},
    {ApiDomain::EventHandling, "EventHandling", "Event Handling", "Answers to events like listeners"},
    {ApiDomain::GIS, "GIS", "Geographic Information System", "Geographically referenced information"},
    {ApiDomain::IO, "IO", "Input-Output", "Read, write data"},
    {ApiDomain::Interpreter, "Interpreter", "Interpreter", "Compiler or interpreter features"},
    {ApiDomain::I18n, "I18n", "Internationalization", "Integrate and infuse international, intercultural, and global dimensions"},
    {ApiDomain::Logic, "Logic", "Logic", "Frameworks, Patterns like Commands, Controls or architecture-oriented classes"},
    {ApiDomain::Lang, "Lang", "Language", "Internal language features and conversions"},
    {ApiDomain::Logging, "Logging", "Logging", "Log registry for the app"},
    {ApiDomain::ML, "ML", "Machine Learning", "ML support like build a model based on training data"},
    {ApiDomain::Microservices, "Microservices", "Microservices/Services", "Independently deployable smaller services. Interface between two different applications so that they can communicate with each other"},
    {ApiDomain::Multimedia, "Multimedia", "Multimedia", "Representation of information with text, audio, video"},
    {ApiDomain::Thread, "Thread", "Multi-Thread", "Support for concurrent execution"},
    {ApiDomain::NLP, "NLP", "Natural Language Processing", "Process and analyze natural language data."},
    {ApiDomain::Network, "Network", "Network", "Web protocols, sockets, RMI APIs"},
    {ApiDomain::OS, "OS", "Operating System", "APIs to access and manage a computer's resources"},
    {ApiDomain::Parser, "Parser", "Parser", "Breaks down data into recognized pieces for further analysis."},
    {ApiDomain::Search, "Search", "Search", "API for web searching"},
    {ApiDomain::Security, "Security", "Security", "Crypto and secure protocols"},
    {ApiDomain::Setup, "Setup", "Setup", "Internal app configurations"},
    {ApiDomain::UI, "UI", "User Interface", "Defines forms, screens, visual controls"},
    {ApiDomain::Util, "Util", "Utility", "Third-party libraries for general use"},
    {ApiDomain::Test, "Test", "Test", "Test automation"},
}};

constexpr const DomainInfo& info(ApiDomain d) { return kDomains[static_cast<std::size_t>(d)]; }
constexpr std::string_view name(ApiDomain d) { return info(d).name; }
constexpr std::size_t index_of(ApiDomain d) { return static_cast<std::size_t>(d); }
constexpr ApiDomain domain_at(std::size_t i) { return kDomains.at(i).domain; }

/// Case-insensitive lookup by short name, display name, or a few common
/// spellings from tracker exports ("i18n", "Micro/services", "Utility").
inline std::optional<ApiDomain> find_domain(std::string_view s) {
  const auto t = text::trim(s);
  for (const auto& d : kDomains)
    if (text::iequals(t, d.name) || text::iequals(t, d.display_name)) return d.domain;
  static constexpr std::pair<std::string_view, ApiDomain> aliases[] = {
      {"Micro/services", ApiDomain::Microservices}, {"Services", ApiDomain::Microservices},
      {"Data Structures", ApiDomain::DataStructure}, {"Database", ApiDomain::DB},
      {"Input and Output", ApiDomain::IO}, {"Input Output", ApiDomain::IO},
      {"Big_Data", ApiDomain::BigData}, {"Multithread", ApiDomain::Thread},
      {"Computer_Graphics", ApiDomain::CG}, {"Error_Handling", ApiDomain::ErrorHandling},
      {"Event_Handling", ApiDomain::EventHandling}, {"Data_Structure", ApiDomain::DataStructure},
  };
  for (const auto& [alias, d] : aliases)
    if (text::iequals(t, alias)) return d;
  return std::nullopt;
}

inline ApiDomain parse_domain(std::string_view s) {
  if (auto d = find_domain(s)) return *d;
  throw ValidationError("unknown API domain '" + std::string(s) + "'");
}

/// Tracker label for a domain: prefix + lowercase short name ("api:ui").
inline std::string tracker_label(ApiDomain d, std::string_view prefix = "api:") {
  return std::string(prefix) + text::to_lower_ascii(name(d));
}

inline std::optional<ApiDomain> from_tracker_label(std::string_view label,
                                                   std::string_view prefix = "api:") {
  if (!label.starts_with(prefix)) return std::nullopt;
  label.remove_prefix(prefix.size());
  for (const auto& d : kDomains)
    if (text::to_lower_ascii(d.name) == label) return d.domain;
  return std::nullopt;
}

}  // namespace apidomain
