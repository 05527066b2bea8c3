#pragma once

#include <map>
#include <string>
#include <vector>

namespace orderlens {

std::string sha256_hex(const void* data, size_t size);
std::string sha256_file_hex(const std::string& path);

// Written alongside every subcommand's outputs. Paths are stored relative to
// the output directory so identical runs into different directories compare
// byte-equal.
struct RunManifest {
    std::string tool_version;
    std::string subcommand;
    std::map<std::string, std::string> config;        // resolved flag -> value
    std::map<std::string, std::string> input_digests; // input name -> sha256
    std::vector<std::string> outputs;                 // relative file names
};

std::string manifest_to_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::string& out_dir);

}
