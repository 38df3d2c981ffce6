// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "minipacs/plugin/dispatcher.hpp"
#include "minipacs/plugin/plugin.hpp"

namespace minipacs::http {

/// Study-level QIDO-RS and instance WADO-RS over the query and storage
/// plugins.
class DicomWebPlugin final : public plugin::WebServicePlugin {
 public:
  explicit DicomWebPlugin(const plugin::Dispatcher& dispatcher) : dispatcher_(dispatcher) {}
  std::string name() const override { return "dicomweb"; }
  std::vector<plugin::WebRoute> routes() override;

  plugin::WebResponse search_studies(const plugin::WebRequest& req) const;
  plugin::WebResponse retrieve_instance(const plugin::WebRequest& req) const;

 private:
  const plugin::Dispatcher& dispatcher_;
};

class DicomWebPluginSet final : public plugin::PluginSet {
 public:
  explicit DicomWebPluginSet(const plugin::Dispatcher& dispatcher)
      : plugin_(std::make_shared<DicomWebPlugin>(dispatcher)) {}
  std::string name() const override { return "dicomweb"; }
  std::vector<std::shared_ptr<plugin::Plugin>> plugins() const override { return {plugin_}; }

 private:
  std::shared_ptr<DicomWebPlugin> plugin_;
};

}  // namespace minipacs::http
