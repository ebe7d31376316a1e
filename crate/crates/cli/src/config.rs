//! Layered configuration: defaults, then a preset, then a key=value file,
//! then command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches};

use crate::error::CliError;
use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    RenderDynamical,
    RenderParameter,
    Bifurcation,
    TransientScan,
    ChannelWidth,
    IndexCheck,
    FitScaling,
    DegenerateCheck,
}

pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help }
}

const MU: Key = key("mu", "4", "growth rate mu > 0");
const GAMMA: Key = key("gamma", "0.2", "death rate gamma in (0, 1]");
const CONV: Key = key("conv-threshold", "1e-6", "radius counted as reaching the origin");
const ESC: Key = key("escape-threshold", "1e3", "radius counted as escaping");
const PNG: Key = key("png", "false", "also write a PNG next to the PPM");

const RENDER_DYNAMICAL: &[Key] = &[
    MU,
    GAMMA,
    key("eps", "1e-6", "offset D - D_c"),
    key("re-min", "-0.6", "window"),
    key("re-max", "1", "window"),
    key("im-min", "-0.4", "window"),
    key("im-max", "0.4", "window"),
    key("width", "1200", "pixels"),
    key("height", "600", "pixels"),
    key("budget", "100000", "iterate budget per pixel"),
    CONV,
    ESC,
    PNG,
    key("output", "render-dynamical.ppm", "PPM path; the histogram goes to <stem>.hist.csv"),
];

const RENDER_PARAMETER: &[Key] = &[
    key("plane", "d", "complexified parameter: d or mu"),
    MU,
    GAMMA,
    key("d", "0.2", "fixed D for the mu plane"),
    key("re-min", "0", "window"),
    key("re-max", "0.75", "window"),
    key("im-min", "-0.1875", "window"),
    key("im-max", "0.1875", "window"),
    key("width", "800", "pixels"),
    key("height", "400", "pixels"),
    key("budget", "10000", "iterate budget per critical orbit"),
    CONV,
    ESC,
    PNG,
    key("output", "render-parameter.ppm", "PPM path"),
];

const BIFURCATION: &[Key] = &[
    key("control", "d", "swept parameter: d or mu"),
    MU,
    GAMMA,
    key("d", "0.2", "fixed D when sweeping mu"),
    key("from", "0", "sweep start"),
    key("to", "0.75", "sweep end"),
    key("n-params", "751", "parameter samples"),
    key("transient-cut", "10000", "iterates discarded"),
    key("n-record", "64", "iterates recorded"),
    key("x0", "1e-4,0.5", "comma-separated initial conditions"),
    key("output", "bifurcation.csv", "CSV path"),
];

const TRANSIENT_SCAN: &[Key] = &[
    MU,
    GAMMA,
    key("eps-from", "1e-8", "smallest eps"),
    key("eps-to", "1e-4", "largest eps"),
    key("eps-per-decade", "4", "log-spaced samples per decade"),
    key("delta", "0.05", "half-width of the bottleneck segment"),
    key("budget", "100000000", "iterate budget per passage"),
    key("output", "transient-scan.csv", "CSV path"),
];

const CHANNEL_WIDTH: &[Key] = &[
    MU,
    GAMMA,
    key("eps", "1e-5", "comma-separated eps values"),
    key("budget", "auto", "iterate budget per point; auto = max(10 N, 1e5)"),
    key("output", "channel-width.csv", "CSV path"),
];

const INDEX_CHECK: &[Key] = &[
    MU,
    GAMMA,
    key("eps", "1e-4,1e-6,1e-8", "comma-separated eps values"),
    key("output", "index-check.csv", "CSV path"),
];

const FIT_SCALING: &[Key] = &[
    key("family", "f", "f (cubic F) or h (general family, zero tails)"),
    MU,
    GAMMA,
    key("a", "-1", "general family: constant coefficient"),
    key("c", "-1", "general family: quadratic coefficient"),
    key("n", "1", "general family: eps exponent"),
    key("m", "1", "general family: linear tail order"),
    key("eps-from", "1e-8", "smallest eps"),
    key("eps-to", "1e-4", "largest eps"),
    key("eps-per-decade", "4", "log-spaced samples per decade"),
    key("delta", "auto", "segment half-width; auto = 0.05 for f, 0.5 for h"),
    key("budget", "100000000", "iterate budget per passage"),
    key("output", "fit-scaling.csv", "CSV path for the samples"),
];

const DEGENERATE_CHECK: &[Key] = &[
    key("eps", "0.1,-0.1,0.01,-0.01", "comma-separated eps values"),
    key("output", "degenerate-check.csv", "CSV path"),
];

impl Command {
    pub const ALL: [Command; 8] = [
        Command::RenderDynamical,
        Command::RenderParameter,
        Command::Bifurcation,
        Command::TransientScan,
        Command::ChannelWidth,
        Command::IndexCheck,
        Command::FitScaling,
        Command::DegenerateCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::RenderDynamical => "render-dynamical",
            Command::RenderParameter => "render-parameter",
            Command::Bifurcation => "bifurcation",
            Command::TransientScan => "transient-scan",
            Command::ChannelWidth => "channel-width",
            Command::IndexCheck => "index-check",
            Command::FitScaling => "fit-scaling",
            Command::DegenerateCheck => "degenerate-check",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Command::RenderDynamical => "escape-time image of the dynamical plane",
            Command::RenderParameter => "critical-orbit classification of a complex parameter plane",
            Command::Bifurcation => "real bifurcation diagram with analytic branches",
            Command::TransientScan => "measured and predicted passage iterates over an eps grid",
            Command::ChannelWidth => "width of the channel between the complex repellers",
            Command::IndexCheck => "numeric holomorphic index against 1/(1 - lambda)",
            Command::FitScaling => "fit N = A eps^p + K to measured passages",
            Command::DegenerateCheck => "fixed points and multipliers of the degenerate families",
        }
    }

    pub fn keys(self) -> &'static [Key] {
        match self {
            Command::RenderDynamical => RENDER_DYNAMICAL,
            Command::RenderParameter => RENDER_PARAMETER,
            Command::Bifurcation => BIFURCATION,
            Command::TransientScan => TRANSIENT_SCAN,
            Command::ChannelWidth => CHANNEL_WIDTH,
            Command::IndexCheck => INDEX_CHECK,
            Command::FitScaling => FIT_SCALING,
            Command::DegenerateCheck => DEGENERATE_CHECK,
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

/// Fully resolved configuration: every key of the command has a value.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub values: BTreeMap<String, String>,
}

fn cli() -> clap::Command {
    let mut root = clap::Command::new("ghostdyn")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Ghost transients past a saddle-node fold in complexified cubic maps")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for c in Command::ALL {
        let mut sub = clap::Command::new(c.name())
            .about(c.about())
            .arg(Arg::new("config").long("config").value_name("FILE").help("key=value file or a run manifest"))
            .arg(Arg::new("preset").long("preset").value_name("NAME").help("named figure parameters"));
        for k in c.keys() {
            sub = sub.arg(
                Arg::new(k.name)
                    .long(k.name)
                    .value_name("VALUE")
                    .action(ArgAction::Set)
                    .allow_hyphen_values(true)
                    .help(format!("{} [default: {}]", k.help, k.default)),
            );
        }
        root = root.subcommand(sub);
    }
    root
}

fn set(values: &mut BTreeMap<String, String>, command: Command, k: &str, v: String, origin: &str) -> Result<(), CliError> {
    if !command.keys().iter().any(|key| key.name == k) {
        return Err(CliError::Usage(format!("unknown key `{k}` for {} ({origin})", command.name())));
    }
    values.insert(k.to_string(), v);
    Ok(())
}

/// `key = value` lines with `#` comments, or the `config` object of a run
/// manifest when the file is JSON.
fn read_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let json: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        let obj = json
            .get("config")
            .and_then(|c| c.as_object())
            .ok_or_else(|| CliError::Usage(format!("--config {}: manifest has no `config` object", path.display())))?;
        return obj
            .iter()
            .map(|(k, v)| match v.as_str() {
                Some(s) => Ok((k.clone(), s.to_string())),
                None => Err(CliError::usage(k, "manifest values must be strings")),
            })
            .collect();
    }
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key = value", path.display(), n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn resolve(command: Command, m: &ArgMatches) -> Result<RunConfig, CliError> {
    let mut values: BTreeMap<String, String> =
        command.keys().iter().map(|k| (k.name.to_string(), k.default.to_string())).collect();

    if let Some(name) = m.get_one::<String>("preset") {
        let preset = presets::lookup(name).ok_or_else(|| {
            let known: Vec<_> = presets::PRESETS.iter().map(|p| p.name).collect();
            CliError::usage("preset", format!("unknown preset `{name}` (known: {})", known.join(", ")))
        })?;
        if !preset.commands.contains(&command) {
            return Err(CliError::usage("preset", format!("`{name}` does not apply to {}", command.name())));
        }
        for (k, v) in (preset.values)(command) {
            set(&mut values, command, k, v, "preset")?;
        }
    }
    if let Some(path) = m.get_one::<String>("config") {
        for (k, v) in read_file(Path::new(path))? {
            set(&mut values, command, &k, v, "config file")?;
        }
    }
    for k in command.keys() {
        if m.value_source(k.name) == Some(ValueSource::CommandLine) {
            if let Some(v) = m.get_one::<String>(k.name) {
                values.insert(k.name.to_string(), v.clone());
            }
        }
    }
    let cfg = RunConfig { command, values };
    crate::commands::validate(&cfg)?;
    Ok(cfg)
}

pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = cli().try_get_matches_from(argv).map_err(|e| {
        use clap::error::ErrorKind::*;
        match e.kind() {
            DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => CliError::Info(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    let (name, sub) = matches.subcommand().ok_or_else(|| CliError::Usage("missing subcommand".into()))?;
    let command = Command::from_name(name).ok_or_else(|| CliError::Usage(format!("unknown subcommand {name}")))?;
    resolve(command, sub)
}

impl RunConfig {
    pub fn raw(&self, k: &str) -> &str {
        self.values.get(k).map(String::as_str).unwrap_or_default()
    }

    pub fn real(&self, k: &str) -> Result<f64, CliError> {
        let v = self.raw(k);
        let x: f64 = v.parse().map_err(|_| CliError::usage(k, format!("expected a number, got `{v}`")))?;
        if !x.is_finite() {
            return Err(CliError::usage(k, format!("must be finite, got `{v}`")));
        }
        Ok(x)
    }

    pub fn real_where(&self, k: &str, ok: impl Fn(f64) -> bool, rule: &str) -> Result<f64, CliError> {
        let x = self.real(k)?;
        if ok(x) {
            Ok(x)
        } else {
            Err(CliError::usage(k, format!("{rule}, got {x}")))
        }
    }

    pub fn positive(&self, k: &str) -> Result<f64, CliError> {
        self.real_where(k, |x| x > 0.0, "must be > 0")
    }

    pub fn count(&self, k: &str) -> Result<u64, CliError> {
        let v = self.raw(k);
        let n: f64 = v.parse().map_err(|_| CliError::usage(k, format!("expected an integer, got `{v}`")))?;
        if !(n >= 0.0 && n.fract() == 0.0 && n <= u64::MAX as f64) {
            return Err(CliError::usage(k, format!("expected a non-negative integer, got `{v}`")));
        }
        Ok(n as u64)
    }

    pub fn list(&self, k: &str) -> Result<Vec<f64>, CliError> {
        let v = self.raw(k);
        let xs = v
            .split(',')
            .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| CliError::usage(k, format!("expected comma-separated numbers, got `{v}`")))?;
        if xs.is_empty() {
            return Err(CliError::usage(k, "empty list"));
        }
        Ok(xs)
    }

    pub fn flag(&self, k: &str) -> Result<bool, CliError> {
        match self.raw(k) {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            v => Err(CliError::usage(k, format!("expected true or false, got `{v}`"))),
        }
    }

    pub fn choice<'a>(&'a self, k: &str, options: &[&str]) -> Result<&'a str, CliError> {
        let v = self.raw(k);
        if options.contains(&v) {
            Ok(v)
        } else {
            Err(CliError::usage(k, format!("expected one of {}, got `{v}`", options.join(", "))))
        }
    }

    /// `auto` or a value parsed by `parse`.
    pub fn auto<T>(&self, k: &str, parse: impl Fn(&Self, &str) -> Result<T, CliError>) -> Result<Option<T>, CliError> {
        if self.raw(k) == "auto" {
            Ok(None)
        } else {
            parse(self, k).map(Some)
        }
    }

    /// `key = value` lines in key order.
    pub fn echo(&self) -> String {
        let mut s = format!("# {}\n", self.command.name());
        for (k, v) in &self.values {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

/// `eps-from`..`eps-to` inclusive, log-spaced at `eps-per-decade`.
pub fn eps_grid(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let from = cfg.positive("eps-from")?;
    let to = cfg.positive("eps-to")?;
    if from > to {
        return Err(CliError::usage("eps-from", format!("{from} exceeds eps-to = {to}")));
    }
    let per = cfg.count("eps-per-decade")?;
    if per == 0 {
        return Err(CliError::usage("eps-per-decade", "must be positive"));
    }
    let (a, b) = (from.log10(), to.log10());
    let steps = ((b - a) * per as f64).round() as usize;
    if steps == 0 {
        return Ok(vec![from]);
    }
    Ok((0..=steps)
        .map(|k| match k {
            0 => from,
            _ if k == steps => to,
            _ => 10f64.powf(a + (b - a) * k as f64 / steps as f64),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<RunConfig, CliError> {
        parse_config(std::iter::once("ghostdyn").chain(args.split_whitespace()))
    }

    #[test]
    fn transient_scan_grid() {
        let cfg = parse("transient-scan --mu 4 --gamma 0.2 --eps-from 1e-8 --eps-to 1e-4 --eps-per-decade 4").unwrap();
        let grid = eps_grid(&cfg).unwrap();
        assert_eq!(grid.len(), 17);
        assert_eq!(grid[0], 1e-8);
        assert_eq!(grid[16], 1e-4);
        assert!((grid[4] - 1e-7).abs() < 1e-20);
    }

    #[test]
    fn fig3c_preset() {
        let cfg = parse("render-dynamical --preset fig3c").unwrap();
        for (k, v) in [
            ("re-min", "-0.6"),
            ("re-max", "1"),
            ("im-min", "-0.4"),
            ("im-max", "0.4"),
            ("width", "1200"),
            ("height", "600"),
            ("budget", "100000"),
        ] {
            assert_eq!(cfg.raw(k), v, "{k}");
        }
        assert_eq!(cfg.real("eps").unwrap(), 1e-6);
    }

    #[test]
    fn flags_override_presets() {
        let cfg = parse("render-dynamical --preset fig3c --width 300 --height 150").unwrap();
        assert_eq!(cfg.raw("width"), "300");
        assert_eq!(cfg.raw("budget"), "100000");
    }

    #[test]
    fn every_preset_resolves() {
        for p in presets::PRESETS {
            for c in p.commands {
                let cfg = parse(&format!("{} --preset {}", c.name(), p.name)).unwrap();
                assert_eq!(cfg.command, *c);
            }
        }
        let fig4a = parse("render-dynamical --preset fig4a").unwrap();
        let x_c = 0.05f64.sqrt();
        assert!((fig4a.real("re-min").unwrap() - (x_c - 1e-4)).abs() < 1e-15);
        let fig2a = parse("bifurcation --preset fig2a").unwrap();
        assert_eq!((fig2a.raw("gamma"), fig2a.raw("d"), fig2a.raw("to")), ("0.075", "0.2", "6"));
        let fig5 = parse("fit-scaling --preset fig5").unwrap();
        assert_eq!((fig5.raw("mu"), fig5.raw("gamma")), ("4", "0.2"));
    }

    #[test]
    fn usage_errors_name_the_key() {
        let e = parse("transient-scan --gamma 1.5").unwrap_err();
        assert!(matches!(&e, CliError::Usage(m) if m.contains("--gamma")), "{e}");
        assert_eq!(e.exit_code(), 2);
        assert!(matches!(parse("render-dynamical --width abc"), Err(CliError::Usage(m)) if m.contains("--width")));
        assert!(matches!(parse("render-dynamical --preset fig5"), Err(CliError::Usage(m)) if m.contains("--preset")));
        assert!(matches!(parse("render-dynamical --preset nope"), Err(CliError::Usage(_))));
        assert!(matches!(parse("render-dynamical --bogus 1"), Err(CliError::Usage(_))));
        assert!(matches!(parse("index-check --eps 1e-4,x"), Err(CliError::Usage(m)) if m.contains("--eps")));
    }

    #[test]
    fn help_is_not_an_error_code() {
        let e = parse("--help").unwrap_err();
        assert_eq!(e.exit_code(), 0);
    }

    #[test]
    fn config_file_layer() {
        let dir = std::env::temp_dir().join(format!("ghostdyn-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "# comment\nmu = 3.5   # trailing\n\ngamma=0.1\n").unwrap();
        let cfg = parse(&format!("index-check --config {} --gamma 0.15", path.display())).unwrap();
        assert_eq!(cfg.raw("mu"), "3.5");
        assert_eq!(cfg.raw("gamma"), "0.15");

        std::fs::write(&path, "width = 10\n").unwrap();
        let e = parse(&format!("index-check --config {}", path.display())).unwrap_err();
        assert!(matches!(e, CliError::Usage(m) if m.contains("width")));
        std::fs::write(&path, "mu 4\n").unwrap();
        assert!(parse(&format!("index-check --config {}", path.display())).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn echo_lists_every_key() {
        let cfg = parse("channel-width --eps 1e-5").unwrap();
        let echo = cfg.echo();
        for k in Command::ChannelWidth.keys() {
            assert!(echo.contains(&format!("{} = ", k.name)));
        }
    }
}
