//! Named parameter sets reproducing the published figures.

use crate::config::Command;

pub struct Preset {
    pub name: &'static str,
    pub commands: &'static [Command],
    pub values: fn(Command) -> Vec<(&'static str, String)>,
}

fn s(v: impl ToString) -> String {
    v.to_string()
}

fn dynamical_window() -> Vec<(&'static str, String)> {
    vec![
        ("mu", s(4)),
        ("gamma", s(0.2)),
        ("re-min", s(-0.6)),
        ("re-max", s(1)),
        ("im-min", s(-0.4)),
        ("im-max", s(0.4)),
        ("width", s(1200)),
        ("height", s(600)),
        ("budget", s(100_000)),
    ]
}

fn with(mut base: Vec<(&'static str, String)>, extra: Vec<(&'static str, String)>) -> Vec<(&'static str, String)> {
    base.extend(extra);
    base
}

fn fig2a(c: Command) -> Vec<(&'static str, String)> {
    match c {
        Command::RenderParameter => vec![
            ("plane", s("mu")),
            ("gamma", s(0.075)),
            ("d", s(0.2)),
            ("re-min", s(0)),
            ("re-max", s(6)),
            ("im-min", s(-1.5)),
            ("im-max", s(1.5)),
        ],
        _ => vec![
            ("control", s("mu")),
            ("gamma", s(0.075)),
            ("d", s(0.2)),
            ("from", s(0.01)),
            ("to", s(6)),
            ("x0", s("1e-4,0.5")),
        ],
    }
}

fn fig2b(c: Command) -> Vec<(&'static str, String)> {
    match c {
        Command::RenderParameter => vec![
            ("plane", s("d")),
            ("mu", s(4)),
            ("gamma", s(0.2)),
            ("re-min", s(0)),
            ("re-max", s(0.75)),
            ("im-min", s(-0.1875)),
            ("im-max", s(0.1875)),
        ],
        _ => vec![
            ("control", s("d")),
            ("mu", s(4)),
            ("gamma", s(0.2)),
            ("from", s(0)),
            ("to", s(0.75)),
            ("x0", s("1e-4,0.5")),
        ],
    }
}

fn fig3a(_: Command) -> Vec<(&'static str, String)> {
    with(dynamical_window(), vec![("eps", s(-0.1))])
}

fn fig3b(_: Command) -> Vec<(&'static str, String)> {
    with(dynamical_window(), vec![("eps", s(0))])
}

fn fig3c(_: Command) -> Vec<(&'static str, String)> {
    with(dynamical_window(), vec![("eps", s(1e-6))])
}

fn fig3d(_: Command) -> Vec<(&'static str, String)> {
    with(
        dynamical_window(),
        vec![
            ("eps", s(1e-6)),
            ("re-min", s(0.2)),
            ("re-max", s(0.25)),
            ("im-min", s(-0.0125)),
            ("im-max", s(0.0125)),
        ],
    )
}

fn fig4a(_: Command) -> Vec<(&'static str, String)> {
    let x_c = 0.05f64.sqrt();
    with(
        dynamical_window(),
        vec![
            ("eps", s(1e-6)),
            ("re-min", format!("{:e}", x_c - 1e-4)),
            ("re-max", format!("{:e}", x_c + 1e-4)),
            ("im-min", s(-5e-5)),
            ("im-max", s(5e-5)),
        ],
    )
}

fn fig5(_: Command) -> Vec<(&'static str, String)> {
    vec![
        ("mu", s(4)),
        ("gamma", s(0.2)),
        ("eps-from", s(1e-8)),
        ("eps-to", s(1e-4)),
        ("eps-per-decade", s(4)),
    ]
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "fig2a", commands: &[Command::RenderParameter, Command::Bifurcation], values: fig2a },
    Preset { name: "fig2b", commands: &[Command::RenderParameter, Command::Bifurcation], values: fig2b },
    Preset { name: "fig3a", commands: &[Command::RenderDynamical], values: fig3a },
    Preset { name: "fig3b", commands: &[Command::RenderDynamical], values: fig3b },
    Preset { name: "fig3c", commands: &[Command::RenderDynamical], values: fig3c },
    Preset { name: "fig3d", commands: &[Command::RenderDynamical], values: fig3d },
    Preset { name: "fig4a", commands: &[Command::RenderDynamical], values: fig4a },
    Preset { name: "fig5", commands: &[Command::TransientScan, Command::FitScaling], values: fig5 },
];

pub fn lookup(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
