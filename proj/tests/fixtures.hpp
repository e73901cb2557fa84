#pragma once

// Shared fixtures: a tiny hand-written annotation book and helpers for
// writing temp files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <string>

#include "mangaspeak/dataset.hpp"

namespace fixtures {

// 1 page, 2 frames side by side (right frame read first), 1 body, 2 texts.
inline const char* kMiniBookXml = R"(<?xml version="1.0" encoding="UTF-8"?>
<book title="MiniBook">
  <characters>
    <character id="c0" name="hero"/>
    <character id="c1" name="rival"/>
  </characters>
  <pages>
    <page index="0" width="1000" height="800">
      <frame id="f0" xmin="520" ymin="40" xmax="960" ymax="760"/>
      <frame id="f1" xmin="40" ymin="40" xmax="480" ymax="760"/>
      <body id="b0" xmin="600" ymin="400" xmax="700" ymax="560" character="c0"/>
      <text id="t0" xmin="560" ymin="80" xmax="680" ymax="160">first&amp;line</text>
      <text id="t1" xmin="80" ymin="100" xmax="220" ymax="180">second line</text>
    </page>
  </pages>
</book>
)";

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        dir_ = std::filesystem::temp_directory_path() /
               ("mspk_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string root() const { return dir_.string(); }

    std::string write(const std::string& name, const std::string& content) const {
        const std::string p = path(name);
        std::filesystem::create_directories(std::filesystem::path(p).parent_path());
        std::ofstream f(p, std::ios::binary);
        f << content;
        return p;
    }

private:
    std::filesystem::path dir_;
};

inline mspk::Dataset mini_dataset(const TempDir& tmp) {
    tmp.write("annotations/MiniBook.xml", kMiniBookXml);
    return mspk::load_dataset(tmp.root());
}

} // namespace fixtures
