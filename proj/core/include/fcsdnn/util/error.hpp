#pragma once

#include <stdexcept>
#include <string>

namespace fcsdnn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: config files, CLI arguments, operation preconditions.
class ConfigError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class PlanError : public Error {
public:
    using Error::Error;
};

class ModelError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

struct PointLocation {
    int patch = -1;
    int subpatch = -1;
    int i = -1;
    int j = -1;
    double x = 0.0;
    double y = 0.0;
};

// Loss of rho > 0 or p > 0. Never clipped; the run stops.
class PositivityError : public Error {
public:
    PositivityError(const std::string& what, PointLocation where, long step, int stage)
        : Error(what), where_(where), step_(step), stage_(stage) {}
    const PointLocation& where() const { return where_; }
    long step() const { return step_; }
    int stage() const { return stage_; }

private:
    PointLocation where_;
    long step_;
    int stage_;
};

} // namespace fcsdnn
