#!/usr/bin/env python3
# Copyright 2026 The Fuseplan Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the shipped model files into models/.

The networks are linear chains: residual additions are dropped, and each
inverted-residual block becomes expand 1x1, depthwise kxk, project 1x1 (no
expand layer when the expansion ratio is 1).
"""

import json
import pathlib
import sys


class Chain:
  def __init__(self, name, h, w, c):
    self.name = name
    self.input = {"h": h, "w": w, "c": c}
    self.c = c
    self.layers = []

  def add(self, kind, c_out, k=1, s=1, p=0):
    layer = {"kind": kind}
    if kind != "global_pool" or k != 0:
      layer["k"] = k
    if kind not in ("global_pool", "dense"):
      layer.update({"s": s, "p": p})
    layer.update({"c_in": self.c, "c_out": c_out})
    self.layers.append(layer)
    self.c = c_out

  def conv(self, c_out, k=1, s=1):
    self.add("conv2d", c_out, k, s, k // 2)

  def dw(self, k, s=1):
    self.add("dwconv2d", self.c, k, s, k // 2)

  def mb(self, expand, c_out, k, s):
    hidden = self.c * expand
    if expand != 1:
      self.conv(hidden)
    self.dw(k, s)
    self.conv(c_out)

  def tail(self, classes):
    self.add("global_pool", self.c, k=0)
    self.add("dense", classes)

  def doc(self):
    return {"name": self.name, "input": self.input, "element_bytes": 1,
            "layers": self.layers}


def mbv2_w035_144():
  width = 0.35
  m = Chain("mbv2-w0.35-144", 144, 144, 3)
  m.conv(int(32 * width), 3, 2)
  # (expansion, channels, repeats, first stride)
  for t, c, n, s in [(1, 16, 1, 1), (6, 24, 2, 2), (6, 32, 3, 2),
                     (6, 64, 4, 2), (6, 96, 3, 1), (6, 160, 3, 2),
                     (6, 320, 1, 1)]:
    for i in range(n):
      m.mb(t, int(c * width), 3, s if i == 0 else 1)
  m.conv(1280)
  m.tail(1000)
  return m


def mn2_vww5_80():
  m = Chain("mn2-vww5-80", 80, 80, 3)
  m.conv(16, 3, 2)
  m.mb(1, 8, 3, 1)
  # (expansion, channels, kernel, stride)
  for t, c, k, s in [(6, 16, 3, 2), (3, 16, 5, 1),
                     (4, 24, 7, 2), (3, 24, 3, 1),
                     (5, 40, 5, 2), (4, 40, 3, 1),
                     (4, 48, 5, 1),
                     (5, 96, 3, 2), (4, 96, 5, 1)]:
    m.mb(t, c, k, s)
  m.tail(2)
  return m


def mn2_320k_176():
  m = Chain("mn2-320k-176", 176, 176, 3)
  m.conv(16, 3, 2)
  m.mb(1, 8, 3, 1)
  for t, c, k, s in [(4, 16, 3, 2), (3, 16, 5, 1),
                     (6, 24, 7, 2), (4, 24, 3, 1), (4, 24, 3, 1),
                     (5, 40, 7, 2), (4, 40, 5, 1), (4, 40, 5, 1),
                     (5, 48, 5, 1), (4, 48, 3, 1),
                     (6, 96, 7, 2), (4, 96, 5, 1), (4, 96, 3, 1),
                     (5, 160, 5, 1), (4, 160, 7, 1),
                     (6, 320, 3, 2)]:
    m.mb(t, c, k, s)
  m.tail(1000)
  return m


def toy3():
  m = Chain("toy3", 10, 10, 1)
  for _ in range(3):
    m.add("conv2d", 1, 3, 1, 0)
  return m


def main():
  out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "models")
  out.mkdir(parents=True, exist_ok=True)
  for fn, file in [(mbv2_w035_144, "mbv2_w035_144.json"),
                   (mn2_vww5_80, "mn2_vww5_80.json"),
                   (mn2_320k_176, "mn2_320k_176.json"),
                   (toy3, "toy3.json")]:
    (out / file).write_text(json.dumps(fn().doc(), indent=2) + "\n")


if __name__ == "__main__":
  main()
