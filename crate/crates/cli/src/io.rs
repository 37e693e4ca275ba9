//! Text artifacts: provenance headers, grouped binary data, MCMC traces.
//!
//! CSV outputs start with `#` comment lines carrying the tool version, the
//! command, the seed and the effective configuration (TOML, one line per
//! comment). JSON outputs carry the same under a `meta` key.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use centered_partition::pg_glm::DesignBlock;
use centered_partition::{GroupedBinaryData, SetPartition};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const TOOL: &str = "cpart";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const CONFIG_MARKER: &str = "# config:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Effective configuration as TOML.
    pub config: String,
}

impl Meta {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            seed: config.seed,
            config: config.to_toml(),
        }
    }

    /// Comment block for text outputs.
    pub fn header(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# tool: {} {}", self.tool, self.version).unwrap();
        writeln!(out, "# command: {}", self.command).unwrap();
        writeln!(out, "# seed: {}", self.seed).unwrap();
        writeln!(out, "{CONFIG_MARKER}").unwrap();
        for line in self.config.lines() {
            if line.is_empty() {
                writeln!(out, "#").unwrap();
            } else {
                writeln!(out, "#   {line}").unwrap();
            }
        }
        out
    }
}

/// Recovers the configuration embedded by [`Meta::header`].
pub fn embedded_config(text: &str) -> Result<RunConfig> {
    let mut lines = text.lines().skip_while(|l| *l != CONFIG_MARKER);
    ensure!(lines.next().is_some(), "no embedded configuration");
    let body: Vec<&str> = lines
        .take_while(|l| l.starts_with("#   ") || *l == "#")
        .map(|l| l.strip_prefix("#   ").unwrap_or(""))
        .collect();
    RunConfig::from_toml(&body.join("\n"))
}

pub fn write_text(path: &Path, meta: &Meta, body: &str) -> Result<()> {
    fs::write(path, format!("{}{}", meta.header(), body)).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct WithMeta<'a, T: Serialize> {
    meta: &'a Meta,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_json<T: Serialize>(path: &Path, meta: &Meta, body: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&WithMeta { meta, body })?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn csv_text(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w)?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

/// Shortest text that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().with_context(|| format!("not a number: {s:?}"))
}

/// Columns `defect,y,x1..xp`. Defects are numbered from 1; shared control
/// rows use `control`.
pub fn data_csv(data: &GroupedBinaryData) -> Result<String> {
    csv_text(|w| {
        let mut header = vec!["defect".to_string(), "y".to_string()];
        header.extend((1..=data.p()).map(|r| format!("x{r}")));
        w.write_record(&header)?;
        let blocks = (0..data.n_defects())
            .map(|i| ((i + 1).to_string(), data.defect(i)))
            .chain(data.controls().map(|c| ("control".to_string(), c)));
        for (name, block) in blocks {
            for j in 0..block.rows() {
                let mut rec = vec![name.clone(), block.responses()[j].to_string()];
                rec.extend(block.row(j).iter().map(|&v| num(v)));
                w.write_record(&rec)?;
            }
        }
        Ok(())
    })
}

pub fn parse_data(text: &str) -> Result<GroupedBinaryData> {
    let mut reader = csv_reader(text);
    let header = reader.headers()?.clone();
    ensure!(
        header.len() >= 3 && &header[0] == "defect" && &header[1] == "y",
        "data header must be defect,y,x1,..,xp"
    );
    let p = header.len() - 2;
    let mut defects: Vec<(Vec<f64>, Vec<u8>)> = Vec::new();
    let mut controls: Option<(Vec<f64>, Vec<u8>)> = None;
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let y: u8 = match rec[1].trim() {
            "0" => 0,
            "1" => 1,
            other => bail!("row {}: response must be 0 or 1, got {other:?}", line + 1),
        };
        let x = rec.iter().skip(2).map(parse_num).collect::<Result<Vec<f64>>>()?;
        let slot = match rec[0].trim() {
            "control" => controls.get_or_insert_with(Default::default),
            id => {
                let i: usize = id.parse().with_context(|| format!("row {}: bad defect id {id:?}", line + 1))?;
                ensure!(i >= 1, "row {}: defects are numbered from 1", line + 1);
                if defects.len() < i {
                    defects.resize_with(i, Default::default);
                }
                &mut defects[i - 1]
            }
        };
        slot.0.extend(x);
        slot.1.push(y);
    }
    let blocks = defects
        .into_iter()
        .map(|(x, y)| DesignBlock::new(p, x, y))
        .collect::<centered_partition::Result<Vec<_>>>()?;
    let controls = controls.map(|(x, y)| DesignBlock::new(p, x, y)).transpose()?;
    Ok(GroupedBinaryData::new(blocks, controls)?)
}

pub fn read_data(path: &Path) -> Result<GroupedBinaryData> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_data(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Retained draws of a fit, as stored on disk.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Traces {
    pub iterations: Vec<usize>,
    pub partitions: Vec<SetPartition>,
    /// `[sample][defect]`.
    pub intercepts: Vec<Vec<f64>>,
    /// `[sample][defect][coefficient]`.
    pub betas: Vec<Vec<Vec<f64>>>,
}

pub const PARTITION_TRACE: &str = "trace_partitions.csv";
pub const INTERCEPT_TRACE: &str = "trace_intercepts.csv";
pub const BETA_TRACE: &str = "trace_betas.csv";

impl Traces {
    pub fn partitions_csv(&self) -> Result<String> {
        csv_text(|w| {
            w.write_record(["iteration", "partition"])?;
            for (it, c) in self.iterations.iter().zip(&self.partitions) {
                w.write_record([it.to_string(), c.to_block_string()])?;
            }
            Ok(())
        })
    }

    pub fn intercepts_csv(&self) -> Result<String> {
        let n = self.intercepts.first().map_or(0, Vec::len);
        csv_text(|w| {
            let mut header = vec!["iteration".to_string()];
            header.extend((1..=n).map(|i| format!("alpha{i}")));
            w.write_record(&header)?;
            for (it, row) in self.iterations.iter().zip(&self.intercepts) {
                let mut rec = vec![it.to_string()];
                rec.extend(row.iter().map(|&v| num(v)));
                w.write_record(&rec)?;
            }
            Ok(())
        })
    }

    pub fn betas_csv(&self) -> Result<String> {
        let p = self.betas.first().and_then(|s| s.first()).map_or(0, Vec::len);
        csv_text(|w| {
            let mut header = vec!["iteration".to_string(), "defect".to_string()];
            header.extend((1..=p).map(|r| format!("beta{r}")));
            w.write_record(&header)?;
            for (it, sample) in self.iterations.iter().zip(&self.betas) {
                for (i, beta) in sample.iter().enumerate() {
                    let mut rec = vec![it.to_string(), (i + 1).to_string()];
                    rec.extend(beta.iter().map(|&v| num(v)));
                    w.write_record(&rec)?;
                }
            }
            Ok(())
        })
    }

    /// Parses the three trace files and checks they describe the same draws.
    pub fn parse(partitions: &str, intercepts: &str, betas: &str) -> Result<Self> {
        let mut t = Traces::default();
        for rec in csv_reader(partitions).records() {
            let rec = rec?;
            ensure!(rec.len() == 2, "partition trace rows need iteration,partition");
            t.iterations.push(rec[0].parse().context("bad iteration")?);
            t.partitions.push(crate::config::parse_center(&rec[1])?);
        }
        let mut rows = 0;
        for rec in csv_reader(intercepts).records() {
            let rec = rec?;
            let it: usize = rec[0].parse().context("bad iteration")?;
            ensure!(t.iterations.get(rows) == Some(&it), "intercept trace does not match partition trace");
            t.intercepts.push(rec.iter().skip(1).map(parse_num).collect::<Result<_>>()?);
            rows += 1;
        }
        ensure!(rows == t.iterations.len(), "intercept trace has {rows} rows, expected {}", t.iterations.len());
        let n = t.partitions.first().map_or(0, SetPartition::n);
        t.betas = vec![Vec::with_capacity(n); rows];
        let mut count = 0;
        for rec in csv_reader(betas).records() {
            let rec = rec?;
            let it: usize = rec[0].parse().context("bad iteration")?;
            let defect: usize = rec[1].parse().context("bad defect")?;
            let (s, i) = (count / n.max(1), count % n.max(1));
            ensure!(
                t.iterations.get(s) == Some(&it) && defect == i + 1,
                "coefficient trace row {} out of order",
                count + 1
            );
            t.betas[s].push(rec.iter().skip(2).map(parse_num).collect::<Result<_>>()?);
            count += 1;
        }
        ensure!(count == rows * n, "coefficient trace has {count} rows, expected {}", rows * n);
        Ok(t)
    }

    pub fn read(dir: &Path) -> Result<(Self, RunConfig)> {
        let read = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))
        };
        let partitions = read(PARTITION_TRACE)?;
        let config = embedded_config(&partitions).context("partition trace header")?;
        let traces = Self::parse(&partitions, &read(INTERCEPT_TRACE)?, &read(BETA_TRACE)?)?;
        Ok((traces, config))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use centered_partition::{simulate_study, SimulationDesign};

    #[test]
    fn data_round_trip_is_exact() {
        let study = simulate_study(&SimulationDesign::standard().scaled(0.1), 4).unwrap();
        let text = data_csv(&study.data).unwrap();
        assert_eq!(parse_data(&text).unwrap(), study.data);
    }

    #[test]
    fn data_round_trip_with_controls_and_fractions() {
        let d = GroupedBinaryData::new(
            vec![
                DesignBlock::from_rows(&[vec![0.1, -2.5e-7], vec![1.0 / 3.0, 7.0]], vec![1, 0]).unwrap(),
                DesignBlock::from_rows(&[vec![f64::MAX, 0.0]], vec![1]).unwrap(),
            ],
            Some(DesignBlock::from_rows(&[vec![1.0, 1.0]], vec![0]).unwrap()),
        )
        .unwrap();
        let meta = Meta::new("simulate", &RunConfig::default());
        let text = format!("{}{}", meta.header(), data_csv(&d).unwrap());
        assert_eq!(parse_data(&text).unwrap(), d);
    }

    #[test]
    fn bad_data_rejected() {
        assert!(parse_data("defect,y,x1\n1,2,0\n").is_err());
        assert!(parse_data("defect,y,x1\n0,1,0\n").is_err());
        assert!(parse_data("id,y,x1\n1,1,0\n").is_err());
        assert!(parse_data("defect,y,x1\n1,1,abc\n").is_err());
        // defect 1 missing
        assert!(parse_data("defect,y,x1\n2,1,0\n").is_err());
    }

    #[test]
    fn header_embeds_config() {
        let mut c = RunConfig {
            seed: 17,
            ..RunConfig::default()
        };
        c.fit.psi = f64::INFINITY;
        let meta = Meta::new("fit", &c);
        let text = format!("{}iteration,partition\n", meta.header());
        assert!(text.starts_with(&format!("# tool: cpart {VERSION}\n")));
        assert_eq!(embedded_config(&text).unwrap(), c);
    }

    #[test]
    fn traces_round_trip() {
        let t = Traces {
            iterations: vec![3, 5],
            partitions: vec!["{1,2}{3}".parse().unwrap(), "{1}{2}{3}".parse().unwrap()],
            intercepts: vec![vec![0.1, -0.2, 1.0 / 7.0], vec![1e-300, 2.0, 3.0]],
            betas: vec![
                vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![-0.5, 0.25]],
                vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 5.0]],
            ],
        };
        let back = Traces::parse(
            &t.partitions_csv().unwrap(),
            &t.intercepts_csv().unwrap(),
            &t.betas_csv().unwrap(),
        )
        .unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn mismatched_traces_rejected() {
        let t = Traces {
            iterations: vec![1],
            partitions: vec!["{1}{2}".parse().unwrap()],
            intercepts: vec![vec![0.0, 0.0]],
            betas: vec![vec![vec![1.0], vec![1.0]]],
        };
        let bad = t.intercepts_csv().unwrap().replace("\n1,", "\n2,");
        assert!(Traces::parse(&t.partitions_csv().unwrap(), &bad, &t.betas_csv().unwrap()).is_err());
    }
}
