#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "samplebench/api/service.hpp"
#include "samplebench/providers/ngram.hpp"
#include "samplebench/providers/registry.hpp"
#include "samplebench/providers/remote.hpp"
#include "samplebench/sampling.hpp"
#include "samplebench/store/jsonl_store.hpp"

namespace {

httplib::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

struct ModelOptions {
  std::string corpus = "data/corpus.txt";
  std::size_t order = 3;
  std::string tokenizer = "char";
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
  cmd->add_option("--corpus", opts.corpus, "UTF-8 text file the toy model is trained on")
      ->check(CLI::ExistingFile)
      ->capture_default_str();
  cmd->add_option("--ngram-order", opts.order, "n-gram order k (>= 2)")
      ->check(CLI::Range(2, 16))
      ->capture_default_str();
  cmd->add_option("--tokenizer", opts.tokenizer, "toy model tokenizer")
      ->check(CLI::IsMember({"char", "word"}))
      ->capture_default_str();
}

std::shared_ptr<samplebench::NGramProvider> load_toy(const ModelOptions& opts) {
  const auto kind = samplebench::parse_tokenizer_kind(opts.tokenizer).value();
  auto model = std::make_shared<const samplebench::NGramModel>(
      samplebench::train_ngram(samplebench::read_corpus_file(opts.corpus), opts.order, kind));
  return std::make_shared<samplebench::NGramProvider>("toy", std::move(model));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"samplebench: explore how top-p and repetition penalties shape generated text"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service and web UI");
  ModelOptions serve_model;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string db_path = "samplebench.jsonl";
  std::string remote_url;
  std::string remote_model;
  double remote_timeout = 30.0;
  std::string static_dir = "web/dist";
  serve->add_option("--host", host, "address to bind")->capture_default_str();
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--db-path", db_path, "JSON Lines session store")->capture_default_str();
  add_model_options(serve, serve_model);
  auto* url_opt = serve->add_option("--remote-url", remote_url,
                                    "base URL of an OpenAI-compatible API, e.g. https://host/v1");
  serve->add_option("--remote-model", remote_model, "model name sent to the remote API")
      ->needs(url_opt);
  serve->add_option("--remote-timeout", remote_timeout, "remote request timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  serve->add_option("--static-dir", static_dir, "directory with the built web UI")
      ->capture_default_str();

  // generate
  auto* gen = app.add_subcommand("generate", "Sample once from the toy model and print the text");
  ModelOptions gen_model;
  samplebench::SamplingParams params;
  std::string prompt;
  std::size_t max_tokens = 128;
  add_model_options(gen, gen_model);
  gen->add_option("--prompt", prompt, "prompt text")->required();
  gen->add_option("--top-p", params.top_p, "nucleus threshold in (0,1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen->add_option("--frequency-penalty", params.frequency_penalty, "in [0,2]")
      ->check(CLI::Range(0.0, 2.0))
      ->capture_default_str();
  gen->add_option("--presence-penalty", params.presence_penalty, "in [0,2]")
      ->check(CLI::Range(0.0, 2.0))
      ->capture_default_str();
  gen->add_option("--seed", params.seed, "PRNG seed")->capture_default_str();
  gen->add_option("--max-tokens", max_tokens, "upper bound on generated tokens")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (!samplebench::SamplingParams::top_p_in_range(params.top_p)) {
        std::cerr << "--top-p must be in (0,1]\n";
        return 2;
      }
      auto toy = load_toy(gen_model);
      const auto result = samplebench::generate_sequence(*toy, prompt, params, max_tokens);
      std::cout << result.text << '\n';
      std::cerr << "tokens=" << result.tokens.size() << " seed=" << params.seed
                << " prng=" << result.prng
                << (result.stopped_on_end_of_text ? " stopped=end_of_text" : "") << '\n';
      return 0;
    }

    auto registry = std::make_shared<samplebench::ProviderRegistry>();
    registry->add(load_toy(serve_model), true);
    if (!remote_url.empty()) {
      samplebench::RemoteProviderConfig config;
      config.base_url = remote_url;
      config.model_name = remote_model;
      config.timeout_seconds = remote_timeout;
      if (const char* key = std::getenv(samplebench::kApiKeyEnv)) config.api_key = key;
      registry->add(std::make_shared<samplebench::RemoteProvider>("remote", std::move(config)));
    }

    auto store = std::make_shared<samplebench::JsonlSessionStore>(db_path);
    samplebench::ServiceOptions options;
    options.static_dir = static_dir;
    samplebench::Service service(store, registry, options);

    httplib::Server server;
    service.mount(server);
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    int bound = port;
    if (port == 0) {
      bound = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
      bound = -1;
    }
    if (bound < 0) {
      std::cerr << "cannot bind " << host << ":" << port << '\n';
      return 1;
    }
    std::cout << "listening on http://" << host << ":" << bound << " (store: " << db_path
              << ", " << store->size() << " records)" << std::endl;
    server.listen_after_bind();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
