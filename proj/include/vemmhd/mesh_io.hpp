#pragma once

#include <string>

#include "vemmhd/mesh.hpp"

namespace vemmhd {

// JSON mesh format: {"vertices": [[x,y],...], "cells": [[i0,i1,...],...]}.
// The writer emits shortest round-tripping decimals, so write/read is exact.
PolyMesh read_mesh_json(const std::string& path);
void write_mesh_json(const PolyMesh& mesh, const std::string& path);

}  // namespace vemmhd
