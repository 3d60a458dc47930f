#include "lvmr/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "lvmr/error.hpp"

namespace lvmr {

using nlohmann::json;

namespace {

std::string describe(double start_s, double end_s)
{
    std::ostringstream out;
    out << '[' << start_s << ", " << end_s << ']';
    return out.str();
}

const json& require(const json& object, const char* key, const std::string& where)
{
    auto it = object.find(key);
    if (it == object.end()) {
        throw FormatError(where + ": missing required field '" + key + "'");
    }
    return *it;
}

double require_number(const json& object, const char* key, const std::string& where)
{
    const auto& value = require(object, key, where);
    if (!value.is_number()) {
        throw FormatError(where + ": field '" + key + "' must be a number");
    }
    return value.get<double>();
}

std::string require_string(const json& object, const char* key, const std::string& where)
{
    const auto& value = require(object, key, where);
    if (!value.is_string()) {
        throw FormatError(where + ": field '" + key + "' must be a string");
    }
    return value.get<std::string>();
}

TimeInterval interval_at(double start_s, double end_s, const std::string& where)
{
    try {
        return TimeInterval(start_s, end_s);
    } catch (const ContractError& e) {
        throw FormatError(where + ": " + e.what());
    }
}

json parse_document(std::string_view json_text, const char* what)
{
    try {
        auto doc = json::parse(json_text);
        if (!doc.is_object()) {
            throw FormatError(std::string("malformed ") + what + ": top level must be an object");
        }
        return doc;
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed ") + what + ": " + e.what());
    }
}

}  // namespace

TimeInterval::TimeInterval(double start_s, double end_s) : m_start(start_s), m_end(end_s)
{
    if (!std::isfinite(start_s) || !std::isfinite(end_s)) {
        throw ContractError("non-finite interval " + describe(start_s, end_s));
    }
    if (start_s < 0.0) {
        throw ContractError("negative start in interval " + describe(start_s, end_s));
    }
    if (end_s <= start_s) {
        throw ContractError("degenerate interval " + describe(start_s, end_s));
    }
}

std::string trim(std::string_view text)
{
    constexpr std::string_view ws = " \t\n\r\f\v";
    auto first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = text.find_last_not_of(ws);
    return std::string(text.substr(first, last - first + 1));
}

SubtitleSegment::SubtitleSegment(TimeInterval interval, std::string_view text)
    : interval(interval), text(trim(text))
{}

Transcript::Transcript(std::string video_id, std::vector<SubtitleSegment> segments)
    : m_video_id(std::move(video_id)), m_segments(std::move(segments))
{
    std::stable_sort(m_segments.begin(), m_segments.end(), [](const auto& a, const auto& b) {
        return a.interval.start_s() < b.interval.start_s();
    });
}

Transcript parse_transcript(std::string_view json_text)
{
    auto doc = parse_document(json_text, "transcript");
    auto video_id = require_string(doc, "video_id", "transcript");
    const auto& raw_segments = require(doc, "segments", "transcript");
    if (!raw_segments.is_array()) {
        throw FormatError("transcript: field 'segments' must be an array");
    }

    std::vector<SubtitleSegment> segments;
    segments.reserve(raw_segments.size());
    for (std::size_t i = 0; i < raw_segments.size(); ++i) {
        const auto& seg = raw_segments[i];
        auto where = "segment " + std::to_string(i);
        if (!seg.is_object()) {
            throw FormatError(where + ": must be an object");
        }
        auto start = require_number(seg, "start", where);
        auto end = require_number(seg, "end", where);
        auto text = require_string(seg, "text", where);
        segments.emplace_back(interval_at(start, end, where), text);
    }
    return Transcript(std::move(video_id), std::move(segments));
}

std::string serialize_transcript(const Transcript& transcript)
{
    json segments = json::array();
    for (const auto& seg : transcript.segments()) {
        segments.push_back({{"start", seg.interval.start_s()},
                            {"end", seg.interval.end_s()},
                            {"text", seg.text}});
    }
    json doc = {{"video_id", transcript.video_id()}, {"segments", std::move(segments)}};
    return doc.dump(2) + "\n";
}

std::string make_clip_id(std::string_view video_id, std::size_t index)
{
    std::string id(video_id);
    id += ':';
    id += std::to_string(index);
    return id;
}

std::vector<Clip> segment_video(const Transcript& transcript)
{
    std::vector<Clip> clips;
    clips.reserve(transcript.segments().size());
    for (std::size_t i = 0; i < transcript.segments().size(); ++i) {
        const auto& seg = transcript.segments()[i];
        clips.push_back(Clip{make_clip_id(transcript.video_id(), i), transcript.video_id(),
                             seg.interval, seg.text});
    }
    return clips;
}

ClipIndex index_clips(const std::vector<Clip>& clips)
{
    ClipIndex index;
    index.reserve(clips.size());
    for (const auto& clip : clips) {
        if (!index.emplace(clip.clip_id, &clip).second) {
            throw ContractError("duplicate clip id " + clip.clip_id);
        }
    }
    return index;
}

std::string serialize_manifest(std::string_view video_id, const std::vector<Clip>& clips)
{
    json entries = json::array();
    for (const auto& clip : clips) {
        entries.push_back({{"clip_id", clip.clip_id},
                           {"start", clip.interval.start_s()},
                           {"end", clip.interval.end_s()},
                           {"text", clip.subtitle_text}});
    }
    json doc = {{"video_id", std::string(video_id)}, {"clips", std::move(entries)}};
    return doc.dump(2) + "\n";
}

ClipManifest parse_manifest(std::string_view json_text)
{
    auto doc = parse_document(json_text, "clip manifest");
    ClipManifest manifest;
    manifest.video_id = require_string(doc, "video_id", "clip manifest");
    const auto& entries = require(doc, "clips", "clip manifest");
    if (!entries.is_array()) {
        throw FormatError("clip manifest: field 'clips' must be an array");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& entry = entries[i];
        auto where = "clip " + std::to_string(i);
        if (!entry.is_object()) {
            throw FormatError(where + ": must be an object");
        }
        auto id = require_string(entry, "clip_id", where);
        if (!seen.insert(id).second) {
            throw FormatError(where + ": duplicate clip id " + id);
        }
        auto interval = interval_at(require_number(entry, "start", where),
                                    require_number(entry, "end", where), where);
        manifest.clips.push_back(
            Clip{std::move(id), manifest.video_id, interval, trim(require_string(entry, "text", where))});
    }
    return manifest;
}

}  // namespace lvmr
