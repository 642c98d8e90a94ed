// Serves the toy backend over the remote scoring protocol.
//
//   tocsin_toy_server [--host 127.0.0.1] [--port 8080] [--toy-model PATH] [--toy-alpha 1.0]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tocsin/cli.hpp"
#include "tocsin/remote.hpp"
#include "tocsin/toy_backend.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Toy scoring server", "tocsin_toy_server"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string model = tocsin::cli::kDefaultToyModel;
  tocsin::ToyOptions opts;
  app.add_option("--host", host);
  app.add_option("--port", port);
  app.add_option("--toy-model", model);
  app.add_option("--toy-alpha", opts.alpha);
  app.add_option("--toy-max-context", opts.max_context);
  CLI11_PARSE(app, argc, argv);

  try {
    const tocsin::ToyBackend backend(tocsin::cli::read_lines(model), opts);
    tocsin::ProtocolServer server(backend);
    std::cerr << "serving " << backend.causal_model_id() << " / " << backend.seq2seq_model_id() << " on "
              << host << ":" << port << "\n";
    server.run(host, port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
