//! Method strings and their parameter sets.
//!
//! A method spec is a name like `msr` or a duality composition like
//! `dehret:msr`, refined by repeated `-p key=value` overrides. Parsing
//! validates names, parameter keys, and value ranges before any image is
//! touched.

use std::cell::Cell;
use std::collections::BTreeMap;

use unveil_core::dehaze::{dcp_dehaze, PatchSpec, DEFAULT_RETAIN};
use unveil_core::duality::{dehret, retdeh};
use unveil_core::error::{Error, Result};
use unveil_core::raster::hist_equalize;
use unveil_core::retinex::{
    homomorphic, kbr, lrsr, msr, path_retinex, rsr, ssr, KbrConfig, LrsrConfig, PathConfig,
    ScaleBank, ScalingFn, SprayConfig, DEFAULT_SSR_SIGMA,
};
use unveil_core::ImageF;

/// Default histogram-equalization bin count.
const DEFAULT_HE_BINS: usize = 256;

/// Default kernel scale for the kernel-based backend.
const DEFAULT_KBR_SIGMA: f64 = 5.0;

/// A parsed method with all its parameters resolved.
#[derive(Clone, Debug, PartialEq)]
pub enum MethodSpec {
    Dcp {
        radius: usize,
        retain: f64,
        refine: bool,
    },
    He {
        bins: usize,
    },
    Ssr {
        sigma: f64,
    },
    Msr {
        sigmas: Vec<f64>,
    },
    Rsr {
        sprays: usize,
        samples: usize,
        radius: Option<f64>,
    },
    Lrsr {
        sprays: usize,
        samples: usize,
        radius: Option<f64>,
        k1: usize,
        k2: usize,
    },
    Kbr {
        sigma: f64,
        scaling: ScalingFn,
    },
    Hf {
        sigma: f64,
    },
    Path {
        paths: usize,
        length: Option<usize>,
    },
    DehRet(Box<MethodSpec>),
    RetDeh(Box<MethodSpec>),
}

/// Splits repeated `key=value` arguments into a map, rejecting duplicates.
pub fn parse_params(raw: &[String]) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for item in raw {
        let (key, value) = item.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("parameter {item:?} is not of the form key=value"))
        })?;
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::InvalidParameter(format!(
                "parameter {key:?} given more than once"
            )));
        }
    }
    Ok(map)
}

/// Typed accessors over a parameter map that report unknown keys.
struct Params {
    map: BTreeMap<String, String>,
}

impl Params {
    fn new(map: &BTreeMap<String, String>) -> Self {
        Self { map: map.clone() }
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn parse_with<T, F>(&mut self, key: &str, default: T, parse: F) -> Result<T>
    where
        F: FnOnce(&str) -> Option<T>,
    {
        match self.take(key) {
            None => Ok(default),
            Some(raw) => parse(&raw).ok_or_else(|| {
                Error::InvalidParameter(format!("parameter {key}={raw} could not be parsed"))
            }),
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        self.parse_with(key, default, |s| s.parse().ok())
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        self.parse_with(key, default, |s| s.parse().ok())
    }

    fn bool(&mut self, key: &str, default: bool) -> Result<bool> {
        self.parse_with(key, default, |s| match s {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        })
    }

    fn finish(self, method: &str) -> Result<()> {
        if let Some(key) = self.map.keys().next() {
            return Err(Error::InvalidParameter(format!(
                "method {method} does not accept parameter {key:?}"
            )));
        }
        Ok(())
    }
}

impl MethodSpec {
    /// Parses a method name with its parameter overrides and validates all
    /// ranges by instantiating the configuration once.
    pub fn parse(name: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        let spec = Self::parse_inner(name, params)?;
        // Surface range errors (for example samples=1) before any I/O; the
        // probe dimensions are arbitrary.
        spec.validate_probe()?;
        Ok(spec)
    }

    fn parse_inner(name: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        if let Some(inner) = name.strip_prefix("dehret:") {
            let spec = Self::parse_inner(inner, params)?;
            if matches!(spec, MethodSpec::Dcp { .. } | MethodSpec::He { .. }) {
                return Err(Error::InvalidParameter(format!(
                    "dehret expects a Retinex backend, got {inner:?}"
                )));
            }
            if matches!(spec, MethodSpec::DehRet(_) | MethodSpec::RetDeh(_)) {
                return Err(Error::InvalidParameter(
                    "duality prefixes cannot be nested".into(),
                ));
            }
            return Ok(MethodSpec::DehRet(Box::new(spec)));
        }
        if let Some(inner) = name.strip_prefix("retdeh:") {
            let spec = Self::parse_inner(inner, params)?;
            if !matches!(spec, MethodSpec::Dcp { .. }) {
                return Err(Error::InvalidParameter(format!(
                    "retdeh expects a dehazing backend, got {inner:?}"
                )));
            }
            return Ok(MethodSpec::RetDeh(Box::new(spec)));
        }

        let mut p = Params::new(params);
        let spec = match name {
            "dcp" => MethodSpec::Dcp {
                radius: p.usize("radius", 7)?,
                retain: p.f64("retain", DEFAULT_RETAIN)?,
                refine: p.bool("refine", true)?,
            },
            "he" => MethodSpec::He {
                bins: p.usize("bins", DEFAULT_HE_BINS)?,
            },
            "ssr" => MethodSpec::Ssr {
                sigma: p.f64("sigma", DEFAULT_SSR_SIGMA)?,
            },
            "msr" => MethodSpec::Msr {
                sigmas: p.parse_with("sigmas", vec![15.0, 80.0, 250.0], |s| {
                    s.split(',').map(|part| part.trim().parse().ok()).collect()
                })?,
            },
            "rsr" => MethodSpec::Rsr {
                sprays: p.usize("sprays", 20)?,
                samples: p.usize("samples", 75)?,
                radius: p.parse_with("radius", None, |s| s.parse().ok().map(Some))?,
            },
            "lrsr" => MethodSpec::Lrsr {
                sprays: p.usize("sprays", 1)?,
                samples: p.usize("samples", 75)?,
                radius: p.parse_with("radius", None, |s| s.parse().ok().map(Some))?,
                k1: p.usize("k1", 25)?,
                k2: p.usize("k2", 25)?,
            },
            "kbr" => MethodSpec::Kbr {
                sigma: p.f64("sigma", DEFAULT_KBR_SIGMA)?,
                scaling: p.parse_with("scaling", ScalingFn::Log, |s| match s {
                    "identity" => Some(ScalingFn::Identity),
                    "log" => Some(ScalingFn::Log),
                    _ => None,
                })?,
            },
            "hf" => MethodSpec::Hf {
                sigma: p.f64("sigma", DEFAULT_SSR_SIGMA)?,
            },
            "path" => MethodSpec::Path {
                paths: p.usize("paths", 50)?,
                length: p.parse_with("length", None, |s| s.parse().ok().map(Some))?,
            },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown method {other:?}"
                )))
            }
        };
        p.finish(name)?;
        Ok(spec)
    }

    fn validate_probe(&self) -> Result<()> {
        match self {
            MethodSpec::Dcp { retain, .. } => {
                if !(*retain > 0.0 && *retain <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "retain must lie in (0, 1], got {retain}"
                    )));
                }
            }
            MethodSpec::He { bins } => {
                if *bins < 2 {
                    return Err(Error::InvalidParameter(format!(
                        "bins must be at least 2, got {bins}"
                    )));
                }
            }
            MethodSpec::Ssr { sigma } | MethodSpec::Hf { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "sigma must be finite and positive, got {sigma}"
                    )));
                }
            }
            MethodSpec::Msr { sigmas } => {
                let weight = 1.0 / sigmas.len().max(1) as f64;
                ScaleBank::new(sigmas.iter().map(|s| (*s, weight)).collect())?;
            }
            MethodSpec::Rsr {
                sprays,
                samples,
                radius,
            } => {
                SprayConfig::new(*sprays, *samples, *radius, 0)?;
            }
            MethodSpec::Lrsr {
                sprays,
                samples,
                radius,
                k1,
                k2,
            } => {
                LrsrConfig::new(SprayConfig::new(*sprays, *samples, *radius, 0)?, *k1, *k2)?;
            }
            MethodSpec::Kbr { sigma, scaling } => {
                KbrConfig::new(*sigma, *scaling)?;
            }
            MethodSpec::Path { paths, length } => {
                PathConfig::new(*paths, length.unwrap_or(64), ScalingFn::Identity, 0)?;
            }
            MethodSpec::DehRet(inner) | MethodSpec::RetDeh(inner) => inner.validate_probe()?,
        }
        Ok(())
    }

    /// Runs the method on an image with the given seed.
    pub fn apply(&self, img: &ImageF, seed: u64) -> Result<ImageF> {
        let out = match self {
            MethodSpec::Dcp {
                radius,
                retain,
                refine,
            } => dcp_dehaze(img, PatchSpec::new(*radius), *retain, *refine),
            MethodSpec::He { bins } => hist_equalize(img, *bins)?,
            MethodSpec::Ssr { sigma } => ssr(img, *sigma),
            MethodSpec::Msr { sigmas } => {
                let weight = 1.0 / sigmas.len() as f64;
                let bank = ScaleBank::new(sigmas.iter().map(|s| (*s, weight)).collect())?;
                msr(img, &bank)
            }
            MethodSpec::Rsr {
                sprays,
                samples,
                radius,
            } => rsr(img, &SprayConfig::new(*sprays, *samples, *radius, seed)?),
            MethodSpec::Lrsr {
                sprays,
                samples,
                radius,
                k1,
                k2,
            } => {
                let spray = SprayConfig::new(*sprays, *samples, *radius, seed)?;
                lrsr(img, &LrsrConfig::new(spray, *k1, *k2)?)
            }
            MethodSpec::Kbr { sigma, scaling } => kbr(img, &KbrConfig::new(*sigma, *scaling)?),
            MethodSpec::Hf { sigma } => homomorphic(img, *sigma),
            MethodSpec::Path { paths, length } => {
                let cfg = match length {
                    Some(len) => PathConfig::new(*paths, *len, ScalingFn::Identity, seed)?,
                    None => {
                        let default = PathConfig::defaults_for(img.width(), img.height(), seed);
                        PathConfig::new(*paths, default.path_length(), ScalingFn::Identity, seed)?
                    }
                };
                path_retinex(img, &cfg)
            }
            MethodSpec::DehRet(inner) => {
                let failure = Cell::new(None);
                let out = dehret(img, |v| match inner.apply(v, seed) {
                    Ok(res) => res,
                    Err(e) => {
                        failure.set(Some(e));
                        v.clone()
                    }
                });
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                out
            }
            MethodSpec::RetDeh(inner) => {
                let failure = Cell::new(None);
                let out = retdeh(img, |v| match inner.apply(v, seed) {
                    Ok(res) => res,
                    Err(e) => {
                        failure.set(Some(e));
                        v.clone()
                    }
                });
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                out
            }
        };
        Ok(out)
    }
}
