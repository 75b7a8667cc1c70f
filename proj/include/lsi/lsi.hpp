#ifndef LSI_LSI_HPP
#define LSI_LSI_HPP

#include "lsi/config.hpp"
#include "lsi/dynamics.hpp"
#include "lsi/errors.hpp"
#include "lsi/experiment.hpp"
#include "lsi/functionals.hpp"
#include "lsi/io.hpp"
#include "lsi/model.hpp"
#include "lsi/orbital_metric.hpp"
#include "lsi/random_fields.hpp"
#include "lsi/spectral.hpp"
#include "lsi/stability_operators.hpp"

#endif  // LSI_LSI_HPP
