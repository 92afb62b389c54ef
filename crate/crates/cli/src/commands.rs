//! Implementations of the four subcommands.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use unveil_core::dehaze::AtmosphericLight;
use unveil_core::error::{Error, Result};
use unveil_core::io::{load_image, save_image, BitDepth};
use unveil_core::metrics::{
    cpsnr, de00, mean_report, ssim, visibility_metrics, write_csv, MetricReport,
};
use unveil_core::synth::{depth_presets, synth_fog, DepthField, FogSpec};
use unveil_core::ImageF;

use crate::manifest::Manifest;
use crate::methods::{parse_params, MethodSpec};
use crate::{EnhanceArgs, EvalArgs, SynthArgs};

/// Method name used for rows that score the input image as-is.
const DIRECT_METHOD: &str = "none";

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("UNVEIL_SEED") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!(
                "UNVEIL_SEED must be an unsigned integer, got {raw:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn bit_depth(bits: u32) -> Result<BitDepth> {
    match bits {
        8 => Ok(BitDepth::Eight),
        16 => Ok(BitDepth::Sixteen),
        other => Err(Error::InvalidParameter(format!(
            "bits must be 8 or 16, got {other}"
        ))),
    }
}

pub fn enhance(args: &EnhanceArgs) -> Result<()> {
    let params = parse_params(&args.params)?;
    let spec = MethodSpec::parse(&args.method, &params)?;
    let depth = bit_depth(args.bits)?;
    let seed = resolve_seed(args.seed)?;

    let img = load_image(&args.input)?;
    let out = spec.apply(&img, seed)?;
    save_image(&args.output, &out, depth)?;

    let mut m = Manifest::new("enhance");
    m.set_path("input", &args.input);
    m.set_path("output", &args.output);
    m.set("method", &args.method);
    m.set("seed", seed);
    m.set("bits", args.bits);
    m.set_params(&params);
    m.write_for(&args.output)
}

fn parse_airlight(raw: &str) -> Result<AtmosphericLight> {
    let values = raw
        .split(',')
        .map(|part| part.trim().parse::<f64>().ok())
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::InvalidParameter(format!("airlight {raw:?} could not be parsed")))?;
    match values.as_slice() {
        [v] => AtmosphericLight::gray(*v),
        [r, g, b] => AtmosphericLight::new([*r, *g, *b]),
        _ => Err(Error::InvalidParameter(format!(
            "airlight expects one value or r,g,b, got {raw:?}"
        ))),
    }
}

fn resolve_depth(spec: &str, width: usize, height: usize) -> Result<DepthField> {
    match spec {
        "ramp" | "corridor" | "steps" => depth_presets(spec, width, height),
        path => DepthField::from_raster(&load_image(Path::new(path))?),
    }
}

/// `hazy.png` gets its transmission map at `hazy_t.png` by default.
fn default_transmission_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().unwrap_or_default().to_string_lossy();
    let ext = output
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    output.with_file_name(format!("{stem}_t{ext}"))
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let seed = resolve_seed(args.seed)?;
    let airlight = parse_airlight(&args.airlight)?;

    let img = load_image(&args.input)?;
    let depth = resolve_depth(&args.depth, img.width(), img.height())?;
    if (depth.width(), depth.height()) != (img.width(), img.height()) {
        return Err(Error::DimensionMismatch {
            expected: (img.width(), img.height(), 1),
            actual: (depth.width(), depth.height(), 1),
        });
    }
    let spec = FogSpec::new(args.beta, airlight, args.amp, args.scale, seed)?;
    let (hazy, tmap) = synth_fog(&img, &depth, &spec);

    let tpath = args
        .transmission
        .clone()
        .unwrap_or_else(|| default_transmission_path(&args.output));
    save_image(&args.output, &hazy, BitDepth::Sixteen)?;
    save_image(&tpath, tmap.image(), BitDepth::Sixteen)?;

    let mut m = Manifest::new("synth");
    m.set_path("input", &args.input);
    m.set_path("output", &args.output);
    m.set_path("transmission", &tpath);
    m.set("depth", &args.depth);
    m.set("beta", args.beta);
    m.set("airlight", &args.airlight);
    m.set("amp", args.amp);
    m.set("scale", args.scale);
    m.set("seed", seed);
    m.write_for(&args.output)
}

fn is_image_file(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| matches!(e, "png" | "pgm" | "ppm"))
}

/// Pairs reference and test images, either one file each or two directories
/// matched by file name.
fn collect_pairs(reference: &Path, input: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    if !reference.is_dir() {
        let id = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "pair".to_string());
        return Ok(vec![(id, reference.to_path_buf(), input.to_path_buf())]);
    }
    if !input.is_dir() {
        return Err(Error::InvalidParameter(format!(
            "--reference is a directory, so --input must be one too, got {}",
            input.display()
        )));
    }
    let mut names: Vec<String> = fs::read_dir(reference)?
        .filter_map(|entry| entry.ok())
        .map(|entry| entry.path())
        .filter(|path| path.is_file() && is_image_file(path))
        .filter_map(|path| path.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(Error::Io(io::Error::new(
            io::ErrorKind::NotFound,
            format!("no images found in {}", reference.display()),
        )));
    }
    Ok(names
        .into_iter()
        .map(|name| {
            let id = Path::new(&name)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| name.clone());
            (id, reference.join(&name), input.join(&name))
        })
        .collect())
}

/// Scores `after` against `reference`, with visibility computed relative to
/// `before`. Metrics that cannot be computed stay empty.
fn score_pair(
    id: &str,
    method: &str,
    reference: &ImageF,
    before: &ImageF,
    after: &ImageF,
) -> MetricReport {
    let mut report = MetricReport::empty(id, method);
    report.ssim = ssim(reference, after).ok();
    report.cpsnr = cpsnr(reference, after).ok();
    report.de00 = de00(reference, after).ok();
    if let Ok(vis) = visibility_metrics(before, after) {
        report.e = vis.e;
        report.r = vis.r;
        report.sigma = Some(vis.sigma);
    }
    report
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let params = parse_params(&args.params)?;
    let methods: Vec<(String, Option<MethodSpec>)> = match &args.methods {
        None => vec![(DIRECT_METHOD.to_string(), None)],
        Some(list) => {
            let names: Vec<&str> = list
                .split(',')
                .map(str::trim)
                .filter(|name| !name.is_empty())
                .collect();
            if names.is_empty() {
                return Err(Error::InvalidParameter("--methods list is empty".into()));
            }
            if names.len() > 1 && !params.is_empty() {
                return Err(Error::InvalidParameter(
                    "parameter overrides require a single method".into(),
                ));
            }
            names
                .into_iter()
                .map(|name| Ok((name.to_string(), Some(MethodSpec::parse(name, &params)?))))
                .collect::<Result<_>>()?
        }
    };
    let seed = resolve_seed(args.seed)?;

    let pairs = collect_pairs(&args.reference, &args.input)?;
    let mut rows = Vec::new();
    for (id, ref_path, test_path) in &pairs {
        let reference = load_image(ref_path)?;
        let test = load_image(test_path)?;
        for (name, spec) in &methods {
            let row = match spec {
                None => score_pair(id, name, &reference, &reference, &test),
                Some(spec) => match spec.apply(&test, seed) {
                    Ok(enhanced) => score_pair(id, name, &reference, &test, &enhanced),
                    Err(_) => MetricReport::empty(id, name),
                },
            };
            rows.push(row);
        }
    }
    rows.sort_by(|a, b| (&a.id, &a.method).cmp(&(&b.id, &b.method)));
    for (name, _) in &methods {
        let subset: Vec<MetricReport> = rows
            .iter()
            .filter(|row| row.method == *name)
            .cloned()
            .collect();
        rows.push(mean_report(&subset, name.as_str()));
    }

    let file = fs::File::create(&args.out)?;
    write_csv(&rows, file)?;

    let mut m = Manifest::new("eval");
    m.set_path("reference", &args.reference);
    m.set_path("input", &args.input);
    m.set_path("out", &args.out);
    if let Some(list) = &args.methods {
        m.set("methods", list);
    }
    m.set("seed", seed);
    m.set_params(&params);
    m.write_for(&args.out)
}

pub fn replay(path: &Path) -> Result<()> {
    let m = Manifest::load(path)?;
    match m.get("command")? {
        "enhance" => enhance(&EnhanceArgs {
            method: m.get("method")?.to_string(),
            params: m.params(),
            seed: Some(m.get_parsed("seed")?),
            bits: m.get_parsed("bits")?,
            input: m.get_path("input")?,
            output: m.get_path("output")?,
        }),
        "synth" => synth(&SynthArgs {
            depth: m.get("depth")?.to_string(),
            beta: m.get_parsed("beta")?,
            airlight: m.get("airlight")?.to_string(),
            amp: m.get_parsed("amp")?,
            scale: m.get_parsed("scale")?,
            seed: Some(m.get_parsed("seed")?),
            transmission: Some(m.get_path("transmission")?),
            input: m.get_path("input")?,
            output: m.get_path("output")?,
        }),
        "eval" => eval(&EvalArgs {
            reference: m.get_path("reference")?,
            input: m.get_path("input")?,
            methods: m.get_opt("methods").map(str::to_string),
            params: m.params(),
            seed: Some(m.get_parsed("seed")?),
            out: m.get_path("out")?,
        }),
        other => Err(Error::InvalidParameter(format!(
            "manifest command {other:?} cannot be replayed"
        ))),
    }
}
