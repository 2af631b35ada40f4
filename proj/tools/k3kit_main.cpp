#include "k3kit/cli.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    bool audit = false;
    for (auto it = args.begin(); it != args.end();) {
        if (*it == "--audit") {
            audit = true;
            it = args.erase(it);
        } else {
            ++it;
        }
    }

    std::ios::sync_with_stdio(false);
    k3kit::cli::CommandResult res =
        k3kit::cli::run(args, [](const std::string& line) { std::cout << line << "\n"; });

    for (const auto& line : res.ndjson) std::cout << line << "\n";
    if (!res.payload.is_null()) {
        if (res.streaming)
            std::cerr << res.payload.dump() << "\n"; // keep stdout pure NDJSON
        else
            std::cout << res.payload.dump(2) << "\n";
    }
    if (audit)
        for (const auto& [op, anchor] : res.audit) std::cerr << "audit: " << op << ": " << anchor << "\n";
    return res.exit_code;
}
