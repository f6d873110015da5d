#include "qsieve/qsieve.h"

#include <cstring>
#include <string>

#include "qsieve/environments.hpp"
#include "qsieve/errors.hpp"
#include "qsieve/runner.hpp"

struct qsieve_config {
  qsieve::RunConfig impl;
};

namespace {

thread_local std::string g_last_error;

qsieve_status to_status(const std::exception& e) {
  g_last_error = e.what();
  if (dynamic_cast<const qsieve::ValidationError*>(&e)) return QSIEVE_ERR_CONFIG;
  if (dynamic_cast<const qsieve::NumericError*>(&e)) return QSIEVE_ERR_NUMERIC;
  if (dynamic_cast<const qsieve::IoError*>(&e)) return QSIEVE_ERR_IO;
  return QSIEVE_ERR;
}

template <typename Fn>
qsieve_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return to_status(e);
  } catch (...) {
    g_last_error = "unknown failure";
    return QSIEVE_ERR;
  }
}

}  // namespace

extern "C" {

qsieve_status qsieve_config_load(const char* path, qsieve_config** out) {
  return guarded([&]() -> qsieve_status {
    if (path == nullptr || out == nullptr) {
      g_last_error = "null argument";
      return QSIEVE_ERR_CONFIG;
    }
    auto* handle = new qsieve_config{qsieve::load_config(path)};
    *out = handle;
    return QSIEVE_OK;
  });
}

qsieve_status qsieve_config_default(const char* experiment, qsieve_config** out) {
  return guarded([&]() -> qsieve_status {
    if (experiment == nullptr || out == nullptr) {
      g_last_error = "null argument";
      return QSIEVE_ERR_CONFIG;
    }
    qsieve::RunConfig config;
    config.experiment = qsieve::experiment_from_string(experiment);
    *out = new qsieve_config{std::move(config)};
    return QSIEVE_OK;
  });
}

void qsieve_config_free(qsieve_config* config) { delete config; }

qsieve_status qsieve_config_get(const qsieve_config* config, const char* key, char* buf,
                                size_t buf_len) {
  return guarded([&]() -> qsieve_status {
    if (config == nullptr || key == nullptr || buf == nullptr || buf_len == 0) {
      g_last_error = "null argument";
      return QSIEVE_ERR_CONFIG;
    }
    // Round-trip through the emitted text to reuse one source of field names.
    std::string wanted(key);
    size_t dot = wanted.find('.');
    if (dot == std::string::npos) {
      g_last_error = "key must be section.key";
      return QSIEVE_ERR_CONFIG;
    }
    std::string section = wanted.substr(0, dot), name = wanted.substr(dot + 1);
    std::string text = qsieve::emit_config(config->impl);
    std::string current_section, line;
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      line = text.substr(pos, end - pos);
      pos = end + 1;
      if (!line.empty() && line.front() == '[' && line.back() == ']') {
        current_section = line.substr(1, line.size() - 2);
      } else {
        size_t eq = line.find(" = ");
        if (eq != std::string::npos && current_section == section &&
            line.substr(0, eq) == name) {
          std::string value = line.substr(eq + 3);
          if (value.size() + 1 > buf_len) {
            g_last_error = "buffer too small";
            return QSIEVE_ERR_CONFIG;
          }
          std::memcpy(buf, value.c_str(), value.size() + 1);
          return QSIEVE_OK;
        }
      }
      if (end == text.size()) break;
    }
    g_last_error = "unknown key '" + wanted + "'";
    return QSIEVE_ERR_CONFIG;
  });
}

qsieve_status qsieve_config_set(qsieve_config* config, const char* key, const char* value) {
  return guarded([&]() -> qsieve_status {
    if (config == nullptr || key == nullptr || value == nullptr) {
      g_last_error = "null argument";
      return QSIEVE_ERR_CONFIG;
    }
    std::string wanted(key);
    size_t dot = wanted.find('.');
    if (dot == std::string::npos) {
      g_last_error = "key must be section.key";
      return QSIEVE_ERR_CONFIG;
    }
    // Emit, patch the matching line, reload through the same parser the CLI
    // uses, so the C API and the file grammar cannot drift apart.
    std::string emitted = qsieve::emit_config(config->impl);
    std::string section = wanted.substr(0, dot), name = wanted.substr(dot + 1);
    std::string current_section, out_text;
    bool replaced = false;
    size_t pos = 0;
    while (pos <= emitted.size()) {
      size_t end = emitted.find('\n', pos);
      if (end == std::string::npos) end = emitted.size();
      std::string line = emitted.substr(pos, end - pos);
      pos = end + 1;
      if (!line.empty() && line.front() == '[' && line.back() == ']') {
        current_section = line.substr(1, line.size() - 2);
      } else {
        size_t eq = line.find(" = ");
        if (eq != std::string::npos && current_section == section &&
            line.substr(0, eq) == name) {
          line = name + " = " + value;
          replaced = true;
        }
      }
      out_text += line;
      out_text += "\n";
      if (end == emitted.size()) break;
    }
    if (!replaced) {
      g_last_error = "unknown key '" + wanted + "'";
      return QSIEVE_ERR_CONFIG;
    }
    config->impl = qsieve::load_config_text(out_text);
    return QSIEVE_OK;
  });
}

qsieve_status qsieve_run(const qsieve_config* config, const char* out_dir, int strict) {
  return guarded([&]() -> qsieve_status {
    if (config == nullptr) {
      g_last_error = "null argument";
      return QSIEVE_ERR_CONFIG;
    }
    std::string dir = (out_dir != nullptr) ? out_dir : "";
    int code = qsieve::run(config->impl, dir, strict != 0);
    if (code == 3) {
      g_last_error = "numeric degradation flags raised under strict mode";
      return QSIEVE_ERR_NUMERIC;
    }
    return QSIEVE_OK;
  });
}

qsieve_status qsieve_emit_plotdata(const char* run_dir) {
  return guarded([&]() -> qsieve_status {
    if (run_dir == nullptr) {
      g_last_error = "null argument";
      return QSIEVE_ERR_CONFIG;
    }
    qsieve::emit_plotdata(run_dir);
    return QSIEVE_OK;
  });
}

const char* qsieve_last_error(void) { return g_last_error.c_str(); }

const char* qsieve_version(void) { return "1.0.0"; }

qsieve_status qsieve_thermal_occupation(double beta_hbar_omega, double* out) {
  return guarded([&]() -> qsieve_status {
    if (out == nullptr) {
      g_last_error = "null argument";
      return QSIEVE_ERR_CONFIG;
    }
    *out = qsieve::thermal_occupation(beta_hbar_omega);
    return QSIEVE_OK;
  });
}

qsieve_status qsieve_g_correlated(double lambda, double sigma, double r, double* out) {
  return guarded([&]() -> qsieve_status {
    if (out == nullptr) {
      g_last_error = "null argument";
      return QSIEVE_ERR_CONFIG;
    }
    *out = qsieve::g_correlated(qsieve::CorrelatedNoiseParams{lambda, sigma}, r);
    return QSIEVE_OK;
  });
}

}  // extern "C"
