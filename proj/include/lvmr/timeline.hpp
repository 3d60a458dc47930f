#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lvmr {

/// Closed time span [start_s, end_s] in seconds. Construction enforces
/// start_s >= 0 and end_s > start_s; both must be finite.
class TimeInterval {
  public:
    TimeInterval(double start_s, double end_s);

    double start_s() const noexcept { return m_start; }
    double end_s() const noexcept { return m_end; }
    double duration() const noexcept { return m_end - m_start; }

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;

  private:
    double m_start;
    double m_end;
};

/// One speech-recognizer segment. Text is whitespace-trimmed and may be empty.
struct SubtitleSegment {
    SubtitleSegment(TimeInterval interval, std::string_view text);

    TimeInterval interval;
    std::string text;

    friend bool operator==(const SubtitleSegment&, const SubtitleSegment&) = default;
};

struct Clip {
    std::string clip_id;
    std::string video_id;
    TimeInterval interval;
    std::string subtitle_text;

    friend bool operator==(const Clip&, const Clip&) = default;
};

/// Segments of one video, stably sorted by start time on construction.
class Transcript {
  public:
    Transcript(std::string video_id, std::vector<SubtitleSegment> segments);

    const std::string& video_id() const noexcept { return m_video_id; }
    const std::vector<SubtitleSegment>& segments() const noexcept { return m_segments; }

    friend bool operator==(const Transcript&, const Transcript&) = default;

  private:
    std::string m_video_id;
    std::vector<SubtitleSegment> m_segments;
};

/// Lookup of clips by id. Does not own the clips.
using ClipIndex = std::unordered_map<std::string, const Clip*>;

std::string trim(std::string_view text);

/// Parses the transcript wire format:
/// {"video_id": "...", "segments": [{"start": s, "end": s, "text": "..."}]}
/// Throws FormatError naming the offending segment index.
Transcript parse_transcript(std::string_view json_text);

std::string serialize_transcript(const Transcript& transcript);

/// One clip per subtitle segment, ids "<video_id>:<index>", intervals copied verbatim.
std::vector<Clip> segment_video(const Transcript& transcript);

ClipIndex index_clips(const std::vector<Clip>& clips);

std::string make_clip_id(std::string_view video_id, std::size_t index);

/// Clip manifest: {"video_id": "...", "clips": [{"clip_id", "start", "end", "text"}]}
std::string serialize_manifest(std::string_view video_id, const std::vector<Clip>& clips);

struct ClipManifest {
    std::string video_id;
    std::vector<Clip> clips;
};

ClipManifest parse_manifest(std::string_view json_text);

}  // namespace lvmr
