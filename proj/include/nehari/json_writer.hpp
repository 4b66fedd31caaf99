#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "weights.hpp"

namespace nehari {

// Streaming JSON emitter. Doubles go through the same %.17g formatting as the
// CSV writers so every number in every output round-trips bit exactly;
// non-finite values become null. Keys are emitted in call order, which keeps
// whole files byte-stable run to run.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& os) : os_(os) {}

    JsonWriter& begin_object() {
        prefix_();
        os_ << '{';
        stack_.push_back(Frame{false, 0});
        return *this;
    }

    JsonWriter& end_object() {
        const Frame f = pop_();
        if (f.count > 0) newline_();
        os_ << '}';
        return *this;
    }

    JsonWriter& begin_array() {
        prefix_();
        os_ << '[';
        stack_.push_back(Frame{false, 0});
        return *this;
    }

    JsonWriter& end_array() {
        const Frame f = pop_();
        if (f.count > 0) newline_();
        os_ << ']';
        return *this;
    }

    JsonWriter& key(const std::string& k) {
        prefix_();
        write_string_(k);
        os_ << ": ";
        stack_.back().expect_value = true;
        return *this;
    }

    JsonWriter& value(double v) {
        prefix_();
        if (std::isfinite(v))
            os_ << detail::format_double(v);
        else
            os_ << "null";
        return *this;
    }

    JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }

    JsonWriter& value(std::int64_t v) {
        prefix_();
        os_ << v;
        return *this;
    }

    JsonWriter& value(std::uint64_t v) {
        prefix_();
        os_ << v;
        return *this;
    }

    JsonWriter& value(bool v) {
        prefix_();
        os_ << (v ? "true" : "false");
        return *this;
    }

    JsonWriter& value(const std::string& v) {
        prefix_();
        write_string_(v);
        return *this;
    }

    JsonWriter& value(const char* v) { return value(std::string(v)); }

    JsonWriter& null() {
        prefix_();
        os_ << "null";
        return *this;
    }

    template <typename T>
    JsonWriter& kv(const std::string& k, T v) {
        key(k);
        return value(v);
    }

    JsonWriter& kv_null(const std::string& k) {
        key(k);
        return null();
    }

    void finish() { os_ << '\n'; }

private:
    struct Frame {
        bool expect_value = false;  // a key was just written
        int count = 0;
    };

    void prefix_() {
        if (stack_.empty()) return;
        Frame& f = stack_.back();
        if (f.expect_value) {
            f.expect_value = false;
            return;  // value follows its key inline
        }
        if (f.count > 0) os_ << ',';
        newline_();
        ++f.count;
    }

    void newline_() {
        os_ << '\n';
        for (std::size_t i = 1; i < stack_.size(); ++i) os_ << "  ";
        if (!stack_.empty()) os_ << "  ";
    }

    void write_string_(const std::string& s) {
        os_ << '"';
        for (const char c : s) {
            switch (c) {
                case '"': os_ << "\\\""; break;
                case '\\': os_ << "\\\\"; break;
                case '\n': os_ << "\\n"; break;
                case '\t': os_ << "\\t"; break;
                case '\r': os_ << "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x",
                                      static_cast<unsigned>(static_cast<unsigned char>(c)));
                        os_ << buf;
                    } else {
                        os_ << c;
                    }
            }
        }
        os_ << '"';
    }

    Frame pop_() {
        Frame f = stack_.back();
        stack_.pop_back();
        return f;
    }

    std::ostream& os_;
    std::vector<Frame> stack_;
};

}
