use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// Everything that determines a run. Written as the first line of every
/// artifact.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub version: &'static str,
    pub precision: &'static str,
    pub out: Option<PathBuf>,
    pub params: Value,
}

impl RunConfig {
    pub fn new(command: &'static str, precision: &'static str, out: Option<&Path>, params: &impl Serialize) -> Self {
        RunConfig {
            command,
            version: env!("CARGO_PKG_VERSION"),
            precision,
            out: out.map(Path::to_path_buf),
            // through Value so object keys come out sorted
            params: serde_json::to_value(params).unwrap_or(Value::Null),
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_value(self).map(|v| v.to_string()).unwrap_or_default()
    }
}

/// CSV writer over stdout or a file, with the config line already written.
pub struct CsvSink {
    wtr: csv::Writer<Box<dyn Write>>,
    path: Option<PathBuf>,
}

impl CsvSink {
    pub fn open(config: &RunConfig, header: &[&str]) -> Result<Self> {
        let path = config.out.clone();
        let mut w: Box<dyn Write> = match &path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        writeln!(w, "# {}", config.json()).with_context(|| describe(&path))?;
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(header).with_context(|| describe(&path))?;
        Ok(CsvSink { wtr, path })
    }

    pub fn row<I, T>(&mut self, record: I) -> Result<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.wtr.write_record(record).with_context(|| describe(&self.path))
    }

    pub fn finish(mut self) -> Result<()> {
        self.wtr.flush().with_context(|| describe(&self.path))
    }
}

fn describe(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!("writing {}", p.display()),
        None => "writing to stdout".to_string(),
    }
}

/// Side artifact: `{"config": …, "result": …}`.
pub fn write_json(path: &Path, config: &RunConfig, result: &impl Serialize) -> Result<()> {
    let doc = serde_json::json!({ "config": config, "result": result });
    let text = serde_json::to_string_pretty(&doc)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
