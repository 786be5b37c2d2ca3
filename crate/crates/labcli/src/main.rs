use labcli::{cmd_cstab, cmd_delta, cmd_mesh, cmd_solve, cmd_table, CliError, ExperimentConfig, TableId};

const USAGE: &str = "polymg <mesh|solve|table|cstab|delta> [options]

commands:
  mesh            generate a mesh hierarchy and quality reports
  solve           run multigrid solves (one row per --cells entry)
  table <T1..T4>  reproduce an experiment table (T1/T2: Richardson rho grids
                  at p=1/p=3; T3: Additive Schwarz counts; T4: hp with p_j=j)
  cstab           prolongation stability constant sweep over p and mesh pairs
  delta           V-cycle contraction estimates with m = 3p^2

options (also accepted as key = value lines via --config FILE):
  --cells N[,N...]   finest cell counts            (default 512)
  --levels J         number of levels              (default 2; tables sweep 2..4)
  --p P | P1,P2,...  degree, uniform or per level coarsest-first (default 1)
  --m M              pre- and post-smoothing steps (default 5)
  --m1 M / --m2 M    asymmetric smoothing counts
  --smoother S       richardson | as               (default richardson)
  --csigma C         penalty constant              (default 10)
  --tol T            relative residual tolerance   (default 1e-8)
  --max-iters N      outer iteration cap           (default 500)
  --seed S           mesh seed                     (default 1)
  --lloyd N          Lloyd relaxation sweeps       (default 20)
  --mms              report manufactured-solution errors (solve)
  --out PATH         output directory or file      (default out)
  --config FILE      flat key = value configuration file

exit codes: 0 ok, 1 usage or i/o error, 2 solver did not converge";

fn run() -> Result<i32, CliError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        return Err(CliError::Usage("missing command".into()));
    }
    let command = args[0].as_str();
    let mut rest = &args[1..];

    let mut table_id = None;
    if command == "table" {
        let Some(id) = rest.first() else {
            return Err(CliError::Usage("table needs an id: T1, T2, T3 or T4".into()));
        };
        table_id = Some(TableId::parse(id)?);
        rest = &rest[1..];
    }

    // collect flag pairs; --config files apply first, flags override
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut config_files: Vec<String> = Vec::new();
    let mut it = rest.iter();
    while let Some(arg) = it.next() {
        let Some(key) = arg.strip_prefix("--") else {
            return Err(CliError::Usage(format!("unexpected argument: {arg}")));
        };
        if key == "mms" {
            pairs.push(("mms".into(), "true".into()));
            continue;
        }
        let Some(value) = it.next() else {
            return Err(CliError::Usage(format!("--{key} needs a value")));
        };
        if key == "config" {
            config_files.push(value.clone());
        } else {
            pairs.push((key.to_string(), value.clone()));
        }
    }
    let mut cfg = ExperimentConfig::default();
    for file in &config_files {
        cfg.apply_file(std::path::Path::new(file))?;
    }
    for (k, v) in &pairs {
        cfg.apply(k, v)?;
    }

    let write_out = |name: &str, csv: &str| -> Result<(), CliError> {
        // --out taken as a directory; the command names its own file
        std::fs::create_dir_all(&cfg.out)
            .map_err(|e| CliError::Io(format!("{:?}: {e}", cfg.out)))?;
        let path = cfg.out.join(name);
        std::fs::write(&path, csv).map_err(|e| CliError::Io(format!("{path:?}: {e}")))?;
        println!("wrote {}", path.display());
        Ok(())
    };

    match command {
        "mesh" => {
            let written = cmd_mesh(&cfg)?;
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(0)
        }
        "solve" => {
            let out = cmd_solve(&cfg)?;
            print!("{}", out.csv);
            write_out("solve.csv", &out.csv)?;
            for (name, contents) in &out.files {
                write_out(name, contents)?;
            }
            Ok(if out.all_converged { 0 } else { 2 })
        }
        "table" => {
            let id = table_id.unwrap();
            let out = cmd_table(&cfg, id)?;
            print!("{}", out.csv);
            write_out(&format!("table_{}.csv", id.name().to_lowercase()), &out.csv)?;
            Ok(0)
        }
        "cstab" => {
            let csv = cmd_cstab(&cfg)?;
            print!("{csv}");
            write_out("cstab.csv", &csv)?;
            Ok(0)
        }
        "delta" => {
            let csv = cmd_delta(&cfg)?;
            print!("{csv}");
            write_out("delta.csv", &csv)?;
            Ok(0)
        }
        other => Err(CliError::Usage(format!("unknown command {other}"))),
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{USAGE}");
            std::process::exit(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
