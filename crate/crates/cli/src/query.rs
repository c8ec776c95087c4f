//! `query`: run one query against the loaded knowledge and print answers.

use crate::args::{CliError, EngineArgs, KbArgs};
use crate::formats::print_answers;
use crate::load;
use clap::Args;
use pkb_core::engine::Engine;
use pkb_core::parse::parse_query;

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Query text, e.g. "can(car, move)?".
    pub query: String,

    #[command(flatten)]
    pub kb: KbArgs,

    #[command(flatten)]
    pub engine: EngineArgs,
}

pub fn run(args: &QueryArgs) -> Result<(), CliError> {
    if args.kb.kb.is_empty() {
        return Err(CliError::Usage(String::from("query needs at least one --kb file")));
    }
    let mut store = load::load_store(&args.kb)?;
    store.seal();
    let goals =
        parse_query(&args.query).map_err(|e| CliError::Input(format!("query: {e}")))?;
    let result = Engine::new(&store, args.engine.config())
        .query(&goals)
        .map_err(|e| CliError::Input(e.to_string()))?;
    print_answers(&args.query, &result, args.engine.format, args.engine.explain);
    Ok(())
}
