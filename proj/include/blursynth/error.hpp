#pragma once

#include <stdexcept>
#include <string>

namespace blursynth {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on a numeric argument or raster shape was violated.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A file could not be read or decoded.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// A file could not be encoded or written.
class WriteError : public Error {
public:
    using Error::Error;
};

/// A file decoded fine but its content does not fit the expected layout.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Kernel mass vanished (e.g. an elastic warp pushed it out of the support).
class DegenerateKernelError : public Error {
public:
    using Error::Error;
};

/// Blur mask is empty or covers the whole image.
class DegenerateMaskError : public Error {
public:
    using Error::Error;
};

/// Inpainting hole leaves no known pixel to propagate from.
class UninpaintableError : public Error {
public:
    using Error::Error;
};

/// ROC/PR metrics need both classes present.
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Sample generation gave up after exhausting its resampling attempts.
class SkipSampleError : public Error {
public:
    using Error::Error;
};

}  // namespace blursynth
