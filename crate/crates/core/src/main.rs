use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use continet::clustering::{elbow_calinski, elbow_distortion, FeatureMatrix, Metric};
use continet::dataset::AdjacencyMode;
use continet::gateways::select_pcgs;
use continet::metrics::{DcSign, NormScope};
use continet::pipeline::{
    cluster, plan_jobs, report_costs, run_plan, write_outputs, Clustering, Features, Inputs, JobKind,
    Manifest, RunConfig,
};
use continet::{Error, Result};

#[derive(Parser)]
#[command(name = "continet", version, about = "Cluster countries and plan a continental network with stench-pheromone ant routing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Overrides {
    /// Run configuration file (flat `key = value`).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse::<NormScope>)]
    norm_scope: Option<NormScope>,
    #[arg(long, value_parser = parse::<AdjacencyMode>)]
    adjacency: Option<AdjacencyMode>,
    /// `+1` adds the data-centre term as written, `-1` rewards data centres.
    #[arg(long, value_parser = parse::<DcSign>, allow_hyphen_values = true)]
    dc_sign: Option<DcSign>,
    /// Evaluate ants of an iteration concurrently.
    #[arg(long)]
    parallel: bool,
}

impl Overrides {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_path(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.norm_scope {
            cfg.norm_scope = n;
        }
        if let Some(a) = self.adjacency {
            cfg.adjacency = a;
        }
        if let Some(d) = self.dc_sign {
            cfg.aco.dc_sign = d;
        }
        if self.parallel {
            cfg.aco.parallel = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Au,
    Kmeans,
    Kmedoids,
    Hac,
    Optics,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Intra,
    Inter,
    Unclustered,
}

#[derive(Clone, Copy, ValueEnum)]
enum Criterion {
    Distortion,
    Calinski,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write every export plus a manifest.
    Plan {
        #[command(flatten)]
        overrides: Overrides,
        /// Output directory (overrides `output` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster the countries and print the assignment as CSV.
    Cluster {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_parser = parse::<Metric>)]
        metric: Option<Metric>,
        #[arg(long, value_parser = parse::<Features>, default_value = "geo")]
        features: Features,
        #[arg(long)]
        cut: Option<f64>,
        #[arg(long, default_value_t = 3)]
        min_pts: usize,
        #[arg(long, default_value_t = 0.05)]
        xi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        countries: Option<PathBuf>,
        #[arg(long)]
        cables: Option<PathBuf>,
    },
    /// Compute one family of routes and print them as CSV.
    Route {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Only the route starting at this country (intra mode).
        #[arg(long)]
        source: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Score k-means over a range of k and pick the knee.
    Elbow {
        #[arg(long, value_enum, default_value = "distortion")]
        criterion: Criterion,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, value_parser = parse::<Features>, default_value = "geo")]
        features: Features,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        countries: Option<PathBuf>,
    },
    /// List prime continental gateways (countries with enough cable landings).
    Pcgs {
        #[arg(long, default_value_t = continet::gateways::DEFAULT_PCG_THRESHOLD)]
        threshold: u32,
        #[arg(long)]
        countries: Option<PathBuf>,
        #[arg(long)]
        cables: Option<PathBuf>,
    },
    /// Re-run every job recorded in a manifest and check the results match.
    Verify {
        manifest: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn inputs_for(countries: Option<PathBuf>, cables: Option<PathBuf>) -> Result<Inputs> {
    Inputs::load(&RunConfig {
        countries,
        cables,
        ..RunConfig::default()
    })
}

fn features(ds: &continet::dataset::CountryDataset, f: Features) -> Result<FeatureMatrix> {
    match f {
        Features::Geo => Ok(FeatureMatrix::geo(ds)),
        Features::Multi => FeatureMatrix::multi(ds),
    }
}

fn run(cli: Cli, stdout: &mut String) -> Result<()> {
    match cli.command {
        Command::Plan { overrides, out } => {
            let cfg = overrides.load()?;
            let inputs = Inputs::load(&cfg)?;
            let plan = run_plan(&cfg, &inputs)?;
            let _ = write!(stdout, "{}", report_costs(&plan));
            let incomplete: Vec<_> = plan.routes().into_iter().filter(|r| !r.complete).collect();
            if !incomplete.is_empty() {
                eprintln!("warning: {} traversal(s) did not visit every node", incomplete.len());
            }
            if let Some(dir) = out.or(cfg.output.clone()) {
                write_outputs(&plan, &cfg, &inputs, &dir)?;
                eprintln!("wrote {}", dir.display());
            }
        }
        Command::Cluster { method, k, metric, features: f, cut, min_pts, xi, seed, countries, cables } => {
            let need_k = || k.ok_or_else(|| Error::Parameter("--k is required for this method".into()));
            let clustering = match method {
                Method::Au => Clustering::Au,
                Method::Kmeans => Clustering::KMeans { k: need_k()?, features: f },
                Method::Kmedoids => Clustering::KMedoids {
                    k: need_k()?,
                    metric: metric.unwrap_or(Metric::Haversine),
                },
                Method::Hac => Clustering::Hac {
                    cut: cut.ok_or_else(|| Error::Parameter("--cut is required for hac".into()))?,
                    metric: metric.unwrap_or(Metric::Euclidean),
                },
                Method::Optics => Clustering::Optics {
                    min_pts,
                    xi,
                    metric: metric.unwrap_or(Metric::Weighted),
                },
            };
            let cfg = RunConfig {
                clustering,
                seed,
                countries,
                cables,
                ..RunConfig::default()
            };
            cfg.validate()?;
            let inputs = Inputs::load(&cfg)?;
            let (a, names) = cluster(&cfg, &inputs.dataset)?.expect("a clustering method was given");
            let _ = writeln!(stdout, "country_id,method,label,cluster");
            for (id, l) in a.ids.iter().zip(&a.labels) {
                let name = l.cluster().map_or("", |c| names[c].as_str());
                let _ = writeln!(stdout, "{id},{},{l},{name}", a.method);
            }
        }
        Command::Route { mode, source, overrides } => {
            let mut cfg = overrides.load()?;
            if matches!(mode, Mode::Unclustered) {
                cfg.unclustered = true;
            }
            let inputs = Inputs::load(&cfg)?;
            let (_, _, jobs) = plan_jobs(&cfg, &inputs)?;
            let want = match mode {
                Mode::Intra => JobKind::Intra,
                Mode::Inter => JobKind::Inter,
                Mode::Unclustered => JobKind::Unclustered,
            };
            let selected: Vec<_> = jobs
                .iter()
                .filter(|j| j.kind == want)
                .filter(|j| source.is_none() || j.source == source)
                .collect();
            if selected.is_empty() {
                return Err(Error::Parameter("no route matches the request".into()));
            }
            let _ = writeln!(stdout, "source,destination_set,path,cost");
            for j in selected {
                let r = j.run(&inputs).map_err(|e| e.in_stage("routing"))?;
                let dest: Vec<_> = j.gateways.iter().cloned().collect();
                let _ = writeln!(
                    stdout,
                    "{},{},{},{}",
                    r.path.first().cloned().unwrap_or_default(),
                    dest.join(";"),
                    r.path.join(";"),
                    r.trc
                );
            }
        }
        Command::Elbow { criterion, k_min, k_max, features: f, seed, countries } => {
            let inputs = inputs_for(countries, None)?;
            let fm = features(&inputs.dataset, f)?;
            let ks: Vec<usize> = (k_min..=k_max).collect();
            let report = match criterion {
                Criterion::Distortion => elbow_distortion(&fm, &ks, seed)?,
                Criterion::Calinski => elbow_calinski(&fm, &ks, seed)?,
            };
            let _ = write!(stdout, "{}", report.to_csv());
        }
        Command::Pcgs { threshold, countries, cables } => {
            let inputs = inputs_for(countries, cables)?;
            let landings = inputs.dataset.landings();
            let _ = writeln!(stdout, "country_id,landings");
            for id in select_pcgs(&landings, threshold) {
                let _ = writeln!(stdout, "{id},{}", landings[&id]);
            }
        }
        Command::Verify { manifest, config } => {
            let m = Manifest::load(&manifest)?;
            let cfg = match config {
                Some(p) => RunConfig::from_path(&p)?,
                None => RunConfig::parse(&m.config, "manifest config")?,
            };
            let inputs = Inputs::load(&cfg)?;
            let results = m.verify(&inputs)?;
            let _ = writeln!(stdout, "{} route(s) reproduced", results.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let mut out = String::new();
    let result = run(cli, &mut out);
    // A closed pipe (e.g. `| head`) is not an error.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
