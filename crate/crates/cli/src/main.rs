// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! `qgate`: serve the gateway, manage users, convert and run programs.

mod error;
mod remote;
mod run;
mod serve;
mod user;

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qgate_core::pipeline::SourceFormat;
use qgate_core::sim::NoiseSpec;
use qgate_service::config::CLI_CLIENT_ID;

use error::{CliError, EXIT_PROGRAM};
use remote::Remote;

#[derive(Parser)]
#[command(name = "qgate", version, about = "Quantum job gateway and client")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the gateway service.
    Serve {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Lower a Pauli program to OpenQASM 2.0.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// JSON array (positional) or object (named) of parameter values.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Execute a program locally or on a gateway; prints the result JSON.
    Run(RunArgs),
    /// Manage users in a stopped service's journal or through a gateway.
    User {
        #[command(subcommand)]
        command: UserCommand,
    },
    /// Obtain tokens with the password grant; prints the token JSON.
    Login {
        #[arg(long)]
        url: String,
        #[arg(long)]
        username: String,
        #[command(flatten)]
        password: PasswordArgs,
    },
    /// List jobs on a gateway.
    Jobs {
        #[command(flatten)]
        remote: RemoteArgs,
        /// Every user's jobs (admin).
        #[arg(long)]
        all: bool,
    },
    /// Download a job's counts as CSV.
    Export {
        job_id: String,
        #[command(flatten)]
        remote: RemoteArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RemoteArgs {
    #[arg(long)]
    url: String,
    #[arg(long, env = "QGATE_TOKEN", hide_env_values = true)]
    token: String,
}

impl RemoteArgs {
    fn connect(&self) -> Result<Remote, CliError> {
        Remote::new(&self.url, Some(self.token.clone()))
    }
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["local", "url"])))]
struct RunArgs {
    file: PathBuf,
    /// Defaults from the extension: .qasm, or .pauli/.txt.
    #[arg(long)]
    format: Option<SourceFormat>,
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Error probability per one-qubit gate.
    #[arg(long, default_value_t = 0.0)]
    p1: f64,
    /// Error probability per two-qubit gate.
    #[arg(long, default_value_t = 0.0)]
    p2: f64,
    /// Execute in-process.
    #[arg(long, conflicts_with = "url")]
    local: bool,
    /// Report measured wall time in local mode (otherwise 0).
    #[arg(long, requires = "local")]
    timing: bool,
    #[arg(long, requires = "token")]
    url: Option<String>,
    #[arg(long, env = "QGATE_TOKEN", hide_env_values = true)]
    token: Option<String>,
}

#[derive(Args)]
struct PasswordArgs {
    #[arg(long, env = "QGATE_PASSWORD", hide_env_values = true)]
    password: Option<String>,
    /// Read the password from the first line of stdin.
    #[arg(long, conflicts_with = "password")]
    password_stdin: bool,
}

impl PasswordArgs {
    fn resolve(&self) -> Result<String, CliError> {
        if self.password_stdin {
            let mut line = String::new();
            std::io::stdin()
                .lock()
                .read_line(&mut line)
                .map_err(|e| CliError::program("IoError", e.to_string()))?;
            return Ok(line.trim_end_matches(['\r', '\n']).to_owned());
        }
        self.password
            .clone()
            .ok_or_else(|| CliError::program("MissingPassword", "pass --password, --password-stdin or QGATE_PASSWORD"))
    }
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["config", "url"])))]
struct UserTarget {
    /// Service config whose journal is edited directly (service stopped).
    #[arg(short, long, conflicts_with = "url")]
    config: Option<PathBuf>,
    #[arg(long, requires = "token")]
    url: Option<String>,
    #[arg(long, env = "QGATE_TOKEN", hide_env_values = true)]
    token: Option<String>,
}

impl UserTarget {
    fn resolve(&self) -> Result<user::Target<'_>, CliError> {
        match (&self.config, &self.url) {
            (Some(c), _) => Ok(user::Target::Local(c)),
            (None, Some(u)) => Ok(user::Target::Remote(Remote::new(u, self.token.clone())?)),
            (None, None) => unreachable!("clap requires one target"),
        }
    }
}

#[derive(Subcommand)]
enum UserCommand {
    Add {
        username: String,
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',', required = true)]
        roles: Vec<String>,
        #[command(flatten)]
        password: PasswordArgs,
        #[command(flatten)]
        target: UserTarget,
    },
    List {
        #[command(flatten)]
        target: UserTarget,
    },
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
                .and_then(|_| out.flush())
                .or_else(|e| match e.kind() {
                    std::io::ErrorKind::BrokenPipe => Ok(()),
                    _ => Err(CliError::program("IoError", e.to_string())),
                })
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Serve { config } => serve::serve(&config),
        Command::Convert { input, output, params } => {
            let source = run::read_source(&input)?;
            let params = params.as_deref().map(run::read_params).transpose()?;
            let qasm = run::convert(&source, params.as_ref())?;
            write_output(output.as_ref(), &qasm)
        }
        Command::Run(args) => {
            let source = run::read_source(&args.file)?;
            let format = match args.format {
                Some(f) => f,
                None => run::infer_format(&args.file)?,
            };
            let input = run::RunInput {
                source,
                format,
                shots: args.shots,
                params: args.params.as_deref().map(run::read_params).transpose()?,
                seed: args.seed,
                noise: NoiseSpec { p1: args.p1, p2: args.p2 },
            };
            let json = if args.local {
                run::run_local(input, args.timing)?
            } else {
                let url = args.url.as_deref().expect("clap requires --url");
                run::run_remote(&Remote::new(url, args.token.clone())?, input)?
            };
            write_output(None, &json)
        }
        Command::User { command } => {
            let text = match command {
                UserCommand::Add {
                    username,
                    group,
                    roles,
                    password,
                    target,
                } => user::add(target.resolve()?, &username, &password.resolve()?, &group, &roles)?,
                UserCommand::List { target } => user::list(target.resolve()?)?,
            };
            write_output(None, &text)
        }
        Command::Login { url, username, password } => {
            let password = password.resolve()?;
            let remote = Remote::new(&url, None)?;
            let bytes = remote.post_form(
                "/auth/token",
                &[
                    ("grant_type", "password"),
                    ("username", &username),
                    ("password", &password),
                    ("client_id", CLI_CLIENT_ID),
                ],
            )?;
            write_output(None, &String::from_utf8_lossy(&bytes))
        }
        Command::Jobs { remote, all } => {
            let path = if all { "/api/qc/jobs?scope=all" } else { "/api/qc/jobs" };
            let bytes = remote.connect()?.get(path)?;
            write_output(None, &String::from_utf8_lossy(&bytes))
        }
        Command::Export { job_id, remote, output } => {
            let bytes = remote.connect()?.get(&format!("/api/qc/jobs/{job_id}/result.csv"))?;
            write_output(output.as_ref(), &String::from_utf8_lossy(&bytes))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("UsageError: {first}");
            for line in rendered.lines().skip(1) {
                eprintln!("{line}");
            }
            return ExitCode::from(EXIT_PROGRAM);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit)
        }
    }
}
