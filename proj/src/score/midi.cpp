/* Copyright 2026 The Tunelab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tunelab/score/score.hpp"

namespace tunelab::score {
namespace {

void put_varlen(std::vector<std::uint8_t>& out, std::uint32_t value) {
  std::uint8_t buf[5];
  int n = 0;
  buf[n++] = static_cast<std::uint8_t>(value & 0x7F);
  while ((value >>= 7) != 0) buf[n++] = static_cast<std::uint8_t>((value & 0x7F) | 0x80);
  while (n > 0) out.push_back(buf[--n]);
}

void put_be(std::vector<std::uint8_t>& out, std::uint32_t value, int bytes) {
  for (int k = bytes - 1; k >= 0; --k) out.push_back(static_cast<std::uint8_t>((value >> (8 * k)) & 0xFF));
}

std::uint32_t to_ticks(Rational whole_notes) {
  const Rational ticks = whole_notes * Rational(4 * kTicksPerQuarter);
  return static_cast<std::uint32_t>(std::llround(ticks.to_double()));
}

struct Message {
  std::uint32_t tick;
  bool on;
  std::uint8_t pitch;
};

}  // namespace

std::vector<std::uint8_t> midi_bytes(const std::vector<NoteEvent>& events, int tempo_bpm, int program) {
  if (tempo_bpm <= 0) throw Error("tempo must be positive");
  std::vector<Message> messages;
  for (const auto& ev : events) {
    if (!ev.pitch) continue;
    const auto pitch = static_cast<std::uint8_t>(std::clamp(*ev.pitch, 0, 127));
    messages.push_back({to_ticks(ev.onset), true, pitch});
    messages.push_back({to_ticks(ev.onset + ev.duration), false, pitch});
  }
  // Offs sort before ons at the same tick so repeated notes retrigger cleanly.
  std::stable_sort(messages.begin(), messages.end(), [](const Message& a, const Message& b) {
    if (a.tick != b.tick) return a.tick < b.tick;
    return !a.on && b.on;
  });

  std::vector<std::uint8_t> track;
  put_varlen(track, 0);
  const auto usec = static_cast<std::uint32_t>(60'000'000 / tempo_bpm);
  track.insert(track.end(), {0xFF, 0x51, 0x03});
  put_be(track, usec, 3);
  put_varlen(track, 0);
  track.push_back(0xC0);
  track.push_back(static_cast<std::uint8_t>(std::clamp(program, 0, 127)));
  std::uint32_t now = 0;
  for (const auto& m : messages) {
    put_varlen(track, m.tick - now);
    now = m.tick;
    track.push_back(m.on ? 0x90 : 0x80);
    track.push_back(m.pitch);
    track.push_back(m.on ? 80 : 0);
  }
  put_varlen(track, 0);
  track.insert(track.end(), {0xFF, 0x2F, 0x00});

  std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd'};
  put_be(out, 6, 4);
  put_be(out, 0, 2);  // format 0
  put_be(out, 1, 2);  // one track
  put_be(out, kTicksPerQuarter, 2);
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  put_be(out, static_cast<std::uint32_t>(track.size()), 4);
  out.insert(out.end(), track.begin(), track.end());
  return out;
}

void write_midi(const std::vector<NoteEvent>& events, int tempo_bpm, int program, std::ostream& out) {
  const auto bytes = midi_bytes(events, tempo_bpm, program);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed to write MIDI data");
}

}  // namespace tunelab::score
