//! Run configuration and its flat `key = value` file form.

use crate::coeff::{Kind, Profile};
use crate::ext::ExtWindow;
use crate::Error;
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Svg,
    Txt,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format, Error> {
        match s {
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            "txt" => Ok(Format::Txt),
            _ => Err(Error::Parse(format!("unknown format '{s}'"))),
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Svg => "svg",
            Format::Txt => "txt",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub prime: u32,
    pub profile: Kind,
    pub envelope: i32,
    pub window: ExtWindow,
    pub module: String,
    pub max_deg: i32,
    pub out: Option<String>,
    pub format: Format,
    pub suite: Option<String>,
    pub mode: String,
    pub construction: String,
    pub op: Option<String>,
    pub element: Option<String>,
    pub k_max: i32,
    pub zero_map: bool,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            prime: 2,
            profile: Kind::Trivial,
            envelope: 2,
            window: ExtWindow::new(3, 0, 6),
            module: "trivial".into(),
            max_deg: 12,
            out: None,
            format: Format::Json,
            suite: None,
            mode: "minimal-resolution".into(),
            construction: "small".into(),
            op: None,
            element: None,
            k_max: 40,
            zero_map: false,
        }
    }
}

/// `s=0..4,ts=0..8`; the homological degree always starts at 0.
pub fn parse_window(s: &str) -> Result<ExtWindow, Error> {
    let bad = || Error::Parse(format!("bad window '{s}'"));
    let mut w = ExtWindow::new(4, 0, 8);
    for part in s.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(bad)?;
        let (a, b) = v.split_once("..").ok_or_else(bad)?;
        let a: i32 = a.trim().parse().map_err(|_| bad())?;
        let b: i32 = b.trim().parse().map_err(|_| bad())?;
        match k.trim() {
            "s" if a == 0 && b >= 0 => w.s_max = b as usize,
            "ts" if a <= b => {
                w.ts_min = a;
                w.ts_max = b;
            }
            _ => return Err(bad()),
        }
    }
    Ok(w)
}

pub fn window_string(w: &ExtWindow) -> String {
    format!("s=0..{},ts={}..{}", w.s_max, w.ts_min, w.ts_max)
}

impl RunConfig {
    pub fn profile(&self) -> Result<Profile, Error> {
        Profile::new(self.prime, self.profile)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Error> {
        let bad = || Error::Parse(format!("bad value '{value}' for '{key}'"));
        let int = || value.parse::<i32>().map_err(|_| bad());
        let opt = || if value.is_empty() { None } else { Some(value.to_string()) };
        match key {
            "prime" => self.prime = value.parse().map_err(|_| bad())?,
            "profile" => self.profile = Kind::parse(value)?,
            "envelope" => self.envelope = int()?,
            "window" => self.window = parse_window(value)?,
            "module" => self.module = value.to_string(),
            "max-deg" => self.max_deg = int()?,
            "out" => self.out = opt(),
            "format" => self.format = Format::parse(value)?,
            "suite" => self.suite = opt(),
            "mode" => self.mode = value.to_string(),
            "construction" => self.construction = value.to_string(),
            "op" => self.op = opt(),
            "element" => self.element = opt(),
            "k-max" => self.k_max = int()?,
            "zero-map" => self.zero_map = value.parse().map_err(|_| bad())?,
            _ => return Err(Error::Parse(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<RunConfig, Error> {
        let mut c = RunConfig::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("bad config line '{line}'")))?;
            c.set(k.trim(), v.trim())?;
        }
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let o = |x: &Option<String>| x.clone().unwrap_or_default();
        let _ = writeln!(s, "prime = {}", self.prime);
        let _ = writeln!(s, "profile = {}", self.profile.name());
        let _ = writeln!(s, "envelope = {}", self.envelope);
        let _ = writeln!(s, "window = {}", window_string(&self.window));
        let _ = writeln!(s, "module = {}", self.module);
        let _ = writeln!(s, "max-deg = {}", self.max_deg);
        let _ = writeln!(s, "out = {}", o(&self.out));
        let _ = writeln!(s, "format = {}", self.format.name());
        let _ = writeln!(s, "suite = {}", o(&self.suite));
        let _ = writeln!(s, "mode = {}", self.mode);
        let _ = writeln!(s, "construction = {}", self.construction);
        let _ = writeln!(s, "op = {}", o(&self.op));
        let _ = writeln!(s, "element = {}", o(&self.element));
        let _ = writeln!(s, "k-max = {}", self.k_max);
        let _ = writeln!(s, "zero-map = {}", self.zero_map);
        s
    }
}
