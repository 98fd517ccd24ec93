from codebench._core import (
    CodebenchError,
    ConfigError,
    LexError,
    StageFailure,
    UnresolvedName,
    bonferroni,
    cognitive_complexity,
    detect_language,
    dump_tree,
    extract_code_blocks,
    find_undefined,
    line_counts,
    mann_whitney_u,
    measure,
    per_kloc,
    rate,
    repair_imports,
    run_all,
    smells,
    spearman_rho,
    wilcoxon_signed_rank,
)

__all__ = [
    "CodebenchError",
    "ConfigError",
    "LexError",
    "StageFailure",
    "UnresolvedName",
    "bonferroni",
    "cognitive_complexity",
    "detect_language",
    "dump_tree",
    "extract_code_blocks",
    "find_undefined",
    "line_counts",
    "mann_whitney_u",
    "measure",
    "per_kloc",
    "rate",
    "repair_imports",
    "run_all",
    "smells",
    "spearman_rho",
    "wilcoxon_signed_rank",
]
