#pragma once

#include <httplib.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

namespace test {

// Counts elements by name anywhere in an XML document (Boost reader).
inline std::size_t count_elements(const boost::property_tree::ptree& t, const std::string& name) {
  std::size_t n = 0;
  for (const auto& [key, child] : t) {
    if (key == name) ++n;
    n += count_elements(child, name);
  }
  return n;
}

inline boost::property_tree::ptree read_xml(const std::string& xml) {
  std::istringstream in(xml);
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(in, tree);
  return tree;
}

// Attribute value of the first element with the given name, depth first.
inline std::string first_attribute(const boost::property_tree::ptree& t, const std::string& element,
                                   const std::string& attribute) {
  for (const auto& [key, child] : t) {
    if (key == element) return child.get<std::string>("<xmlattr>." + attribute, "");
    std::string found = first_attribute(child, element, attribute);
    if (!found.empty()) return found;
  }
  return {};
}

// Loopback HTTP server used as a stand-in external backend.
class StubServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit StubServer(Handler handler) {
    server_.Post("/convert", [handler](const httplib::Request& req, httplib::Response& res) { handler(req, res); });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/convert"; }
  int port() const { return port_; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace test
