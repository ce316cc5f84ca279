"""Command-line pipelines: train, attack, augment, eval, report, serve, toygen.

Options resolve in three layers: command-line flags win over the optional
``--config`` file (plain ``key = value`` lines, ``#`` comments; keys are the
flag names with dashes as underscores), which wins over built-in defaults.
The external scorer endpoint may also come from the ``CODESWITCH_ENDPOINT``
environment variable (flag > environment > config file).

Every command that writes an output directory echoes its fully resolved
options to ``config.txt`` there, and every output embeds nothing but the
inputs and the seed, so a fixed seed reproduces runs byte for byte.

Exit codes: 0 success; 2 configuration or data error; 3 scorer transport
error; 4 per-utterance failures under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .attack import AttackConfig, adversarial_dataset, attack_dataset, write_results_jsonl
from .augment import AugmentConfig, generate_adversarial_set, split
from .candidates import PhraseSource, WordSource, load_alignments, load_lexicon
from .corpus import Dataset, load_dataset, save_dataset
from .errors import CodeswitchError, ConfigError, DataError, TransportError
from .features import FeatureConfig
from .metrics import combine, evaluate, load_report_json, render_report, save_report_json
from .model import JointLinearModel, TrainConfig, train
from .protocol import ExternalScorerClient, ScorerServer, serve_stdio
from .toygen import ToySpec, generate_toy, write_toy_files

ENDPOINT_ENV = "CODESWITCH_ENDPOINT"


# ------------------------------------------------------------ option plumbing


def parse_config_file(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}: line {lineno}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")


def _parse_bool(s: str) -> bool:
    if s.lower() in _TRUE:
        return True
    if s.lower() in _FALSE:
        return False
    raise ConfigError(f"expected a boolean, got {s!r}")


class Options:
    """Flag values layered over a config file over defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = parse_config_file(args.config) if getattr(args, "config", None) else {}
        self.resolved: dict[str, object] = {}

    def get(self, name: str, default=None, cast=str):
        value = getattr(self.args, name, None)
        if value is None and name in self.config:
            raw = self.config[name]
            value = _parse_bool(raw) if cast is bool else cast(raw)
        if value is None:
            value = default
        self.resolved[name] = value
        return value

    def get_list(self, name: str, default=()) -> list[str]:
        value = getattr(self.args, name, None)
        if value is None and name in self.config:
            value = [v for v in self.config[name].split(",") if v]
        if value is None:
            value = list(default)
        self.resolved[name] = ",".join(value)
        return list(value)

    def require(self, name: str, cast=str):
        value = self.get(name, None, cast)
        if value is None:
            raise ConfigError(f"missing required option --{name.replace('_', '-')}")
        return value

    def echo(self, out_dir: Path, command: str) -> None:
        lines = [f"command = {command}"]
        for key in sorted(self.resolved):
            value = self.resolved[key]
            if value is None:
                continue
            lines.append(f"{key} = {value}")
        (out_dir / "config.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_lang_path(pairs: list[str], flag: str) -> list[tuple[str, str]]:
    out = []
    for pair in pairs:
        lang, sep, path = pair.partition("=")
        if not sep or not lang or not path:
            raise ConfigError(f"--{flag} expects LANG=PATH, got {pair!r}")
        out.append((lang, path))
    return out


def _check_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{what} file not found: {path}")
    return p


def _out_dir(opts: Options) -> Path:
    out = Path(opts.require("out_dir"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve_scorer(opts: Options):
    endpoint = getattr(opts.args, "endpoint", None) or os.environ.get(ENDPOINT_ENV) or None
    if endpoint is None and "endpoint" in opts.config:
        endpoint = opts.config["endpoint"]
    opts.resolved["endpoint"] = endpoint
    if endpoint:
        client = ExternalScorerClient(endpoint, timeout=opts.get("timeout", 30.0, float))
        # fail fast with a transport error instead of inside the pipeline
        client._connect()
        return client
    model_path = opts.get("model")
    if model_path is None:
        raise ConfigError("need --model FILE or --endpoint HOST:PORT (or CODESWITCH_ENDPOINT)")
    return JointLinearModel.load(_check_file(model_path, "model"))


def _load_data(opts: Options, single: bool = False) -> list[tuple[str, Dataset]]:
    pairs = _parse_lang_path(opts.get_list("data"), "data")
    if not pairs:
        raise ConfigError("missing required option --data LANG=PATH")
    if single and len(pairs) > 1:
        raise ConfigError("this command takes exactly one --data LANG=PATH")
    bio_policy = opts.get("bio_policy", "repair")
    return [
        (lang, load_dataset(_check_file(path, "dataset"), lang, bio_policy=bio_policy))
        for lang, path in pairs
    ]


# ------------------------------------------------------------------- commands


def cmd_train(args: argparse.Namespace) -> int:
    opts = Options(args)
    datasets = [ds for _, ds in _load_data(opts)]
    langs = opts.get_list("langs")
    if langs:
        datasets = [ds for ds in datasets if ds.lang in langs]
        if not datasets:
            raise ConfigError(f"--langs {','.join(langs)} matched no loaded dataset")
    cfg = TrainConfig(
        epochs=opts.get("epochs", 30, int),
        lr=opts.get("lr", 0.5, float),
        l2=opts.get("l2", 1e-4, float),
        batch_size=opts.get("batch_size", 32, int),
        seed=opts.get("seed", 0, int),
        features=FeatureConfig(
            window=opts.get("window", 2, int),
            max_affix=opts.get("max_affix", 3, int),
        ),
    )
    out = _out_dir(opts)
    quiet = opts.get("quiet", False, bool)
    log = (lambda line: print(line, file=sys.stderr)) if not quiet else None
    model = train(cfg, datasets, log=log)
    model.save(out / "model.json")
    opts.echo(out, "train")
    n = sum(len(ds) for ds in datasets)
    print(f"trained on {n} utterances -> {out / 'model.json'}", file=sys.stderr)
    return 0


def _candidate_source(opts: Options, mode: str, src_lang: str, embedded_lang: str):
    if mode == "word":
        path = opts.get("lexicon")
        if path is None:
            raise ConfigError("--mode word needs --lexicon PATH")
        lex = load_lexicon(_check_file(path, "lexicon"), src_lang, embedded_lang)
        return WordSource(lex, k_max=opts.get("k_max", 8, int))
    path = opts.get("alignments")
    if path is None:
        raise ConfigError("--mode phrase needs --alignments PATH")
    return PhraseSource(load_alignments(_check_file(path, "alignments"), src_lang, embedded_lang))


def cmd_attack(args: argparse.Namespace) -> int:
    opts = Options(args)
    (_, ds), = _load_data(opts, single=True)
    mode = opts.require("mode")
    embedded = opts.require("embedded_lang")
    cfg = AttackConfig(
        mode=mode,
        embedded_lang=embedded,
        k_max=opts.get("k_max", 8, int),
        seed=opts.get("seed", 0, int),
        accept_on_tie=not opts.get("no_tie_accept", False, bool),
    )
    source = _candidate_source(opts, mode, ds.lang, embedded)
    scorer = _resolve_scorer(opts)
    out = _out_dir(opts)
    run = attack_dataset(ds, scorer, source, cfg, parallelism=opts.get("parallelism", 1, int))
    write_results_jsonl(run.results, out / "results.jsonl")
    save_dataset(adversarial_dataset(run.results, lang=ds.lang), out / "adversarial.tsv")
    summary = run.summary.to_dict()
    summary["seed"] = cfg.seed
    summary["mode"] = cfg.mode
    summary["embedded_lang"] = cfg.embedded_lang
    summary["failures"] = [
        {"index": f.index, "id": f.utterance_id, "error": f.error} for f in run.failures
    ]
    (out / "summary.json").write_text(
        json.dumps(summary, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    opts.echo(out, "attack")
    print(
        f"attacked {run.summary.n_attacked}/{run.summary.n_utterances} utterances, "
        f"switch ratio {run.summary.code_switch_ratio:.3f} -> {out}",
        file=sys.stderr,
    )
    if run.failures:
        for f in run.failures:
            print(f"failed: {f.utterance_id}: {f.error}", file=sys.stderr)
        if opts.get("strict", False, bool):
            return 4
    return 0


def cmd_augment(args: argparse.Namespace) -> int:
    opts = Options(args)
    (_, pivot), = _load_data(opts, single=True)
    langs = opts.get_list("langs")
    if not langs:
        raise ConfigError("missing required option --langs LANG[,LANG...]")
    mode = opts.get("mode", "phrase")
    ratio_s = opts.get("split", "9:1")
    try:
        a, _, b = ratio_s.partition(":")
        ratio = (int(a), int(b))
    except ValueError:
        raise ConfigError(f"--split expects A:B, got {ratio_s!r}") from None
    cfg = AugmentConfig(
        embedded_langs=tuple(langs),
        replace_prob=opts.get("replace_prob", 0.5, float),
        mode=mode,
        seed=opts.get("seed", 0, int),
        split_ratio=ratio,
        keep_uncovered=opts.get("keep_uncovered", False, bool),
    )
    lexicons = dict(_parse_lang_path(opts.get_list("lexicon"), "lexicon"))
    alignments = dict(_parse_lang_path(opts.get_list("alignments"), "alignments"))
    sources = {}
    for lang in langs:
        if mode == "word":
            if lang not in lexicons:
                raise ConfigError(f"--mode word needs --lexicon {lang}=PATH")
            sources[lang] = WordSource(
                load_lexicon(_check_file(lexicons[lang], "lexicon"), pivot.lang, lang),
                k_max=opts.get("k_max", 8, int),
            )
        else:
            if lang not in alignments:
                raise ConfigError(f"--mode phrase needs --alignments {lang}=PATH")
            sources[lang] = PhraseSource(
                load_alignments(_check_file(alignments[lang], "alignments"), pivot.lang, lang)
            )
    out = _out_dir(opts)
    with_lang = opts.get("lang_column", False, bool)
    mixed = generate_adversarial_set(pivot, sources, cfg)
    train_ds, test_ds = split(mixed, ratio=cfg.split_ratio, seed=cfg.seed)
    save_dataset(mixed, out / "mixed.tsv", with_lang=with_lang)
    save_dataset(train_ds, out / "train.tsv", with_lang=with_lang)
    save_dataset(test_ds, out / "test.tsv", with_lang=with_lang)
    summary = {
        "n_pivot": len(pivot),
        "n_generated": len(mixed),
        "n_train": len(train_ds),
        "n_test": len(test_ds),
        "embedded_langs": list(langs),
        "replace_prob": cfg.replace_prob,
        "mode": cfg.mode,
        "seed": cfg.seed,
    }
    (out / "summary.json").write_text(
        json.dumps(summary, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    opts.echo(out, "augment")
    print(
        f"generated {len(mixed)} utterances ({len(train_ds)} train / {len(test_ds)} test) -> {out}",
        file=sys.stderr,
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    opts = Options(args)
    datasets = _load_data(opts)
    scorer = _resolve_scorer(opts)
    span = opts.get("span_f1", False, bool)
    rows: dict = {}
    for _, ds in datasets:
        report = evaluate(scorer, ds, span_f1=span)
        for lang, m in report.per_lang.items():
            if lang in rows:
                raise ConfigError(f"language {lang!r} appears in more than one --data file")
            rows[lang] = m
    report = combine(rows)
    out = _out_dir(opts)
    name = opts.get("name", "model")
    save_report_json(report, out / "report.json")
    (out / "report.tsv").write_text(render_report({name: report}, fmt="tsv"), encoding="utf-8")
    opts.echo(out, "eval")
    avg = report.average
    print(
        f"{name}: intent {avg.intent_accuracy:.3f}, slot-f1 {avg.slot_f1_micro:.3f}, "
        f"semantic {avg.semantic_accuracy:.3f} -> {out}",
        file=sys.stderr,
    )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    opts = Options(args)
    inputs = _parse_lang_path(opts.get_list("inputs"), "inputs")
    if not inputs:
        raise ConfigError("missing required option --inputs NAME=REPORT.JSON")
    reports = {name: load_report_json(_check_file(path, "report")) for name, path in inputs}
    metrics_list = opts.get_list("metrics", ("intent_accuracy", "slot_f1_micro", "semantic_accuracy"))
    text = render_report(reports, fmt=opts.get("fmt", "tsv"), metrics=metrics_list)
    out_path = opts.get("out")
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    opts = Options(args)
    model = JointLinearModel.load(_check_file(opts.require("model"), "model"))
    if opts.get("stdio", False, bool):
        serve_stdio(model, sys.stdin.buffer, sys.stdout.buffer)
        return 0
    server = ScorerServer(model, host=opts.get("host", "127.0.0.1"), port=opts.get("port", 8753, int))
    print(f"serving scorer on {server.endpoint}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_toygen(args: argparse.Namespace) -> int:
    opts = Options(args)
    spec = ToySpec(
        n_train=opts.get("n_train", 500, int),
        n_test=opts.get("n_test", 100, int),
        pivot_lang=opts.get("pivot_lang", "aa"),
        embedded_lang=opts.get("embedded_lang", "bb"),
        seed=opts.get("seed", 0, int),
    )
    out = _out_dir(opts)
    paths = write_toy_files(generate_toy(spec), out)
    opts.echo(out, "toygen")
    print(f"wrote {len(paths)} toy corpus files -> {out}", file=sys.stderr)
    return 0


# --------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codeswitch",
        description="Code-switching adversarial attacks and augmentation "
        "for joint intent/slot models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key = value config file; flags win")
        p.set_defaults(func=func)
        return p

    p = add("train", cmd_train, "train the built-in joint linear victim model")
    p.add_argument("--data", action="append", metavar="LANG=PATH")
    p.add_argument("--langs", type=lambda s: s.split(","), metavar="LANG[,LANG...]",
                   help="restrict training to these languages")
    p.add_argument("--out-dir")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--l2", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--max-affix", type=int)
    p.add_argument("--quiet", action="store_true", default=None)

    p = add("attack", cmd_attack, "run the greedy code-switching attack")
    p.add_argument("--data", action="append", metavar="LANG=PATH")
    p.add_argument("--model")
    p.add_argument("--endpoint", metavar="HOST:PORT")
    p.add_argument("--mode", choices=("word", "phrase"))
    p.add_argument("--embedded-lang")
    p.add_argument("--lexicon")
    p.add_argument("--alignments")
    p.add_argument("--k-max", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--no-tie-accept", action="store_true", default=None,
                   help="require strictly increasing loss to accept")
    p.add_argument("--parallelism", type=int)
    p.add_argument("--strict", action="store_true", default=None)
    p.add_argument("--out-dir")

    p = add("augment", cmd_augment, "generate a code-mixed training set (no model needed)")
    p.add_argument("--data", action="append", metavar="LANG=PATH")
    p.add_argument("--langs", type=lambda s: s.split(","), metavar="LANG[,LANG...]")
    p.add_argument("--mode", choices=("word", "phrase"))
    p.add_argument("--lexicon", action="append", metavar="LANG=PATH")
    p.add_argument("--alignments", action="append", metavar="LANG=PATH")
    p.add_argument("--replace-prob", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--split", metavar="A:B")
    p.add_argument("--k-max", type=int)
    p.add_argument("--lang-column", action="store_true", default=None,
                   help="write 5-column TSV with a lang column")
    p.add_argument("--keep-uncovered", action="store_true", default=None)
    p.add_argument("--out-dir")

    p = add("eval", cmd_eval, "evaluate a scorer on labeled data")
    p.add_argument("--data", action="append", metavar="LANG=PATH")
    p.add_argument("--model")
    p.add_argument("--endpoint", metavar="HOST:PORT")
    p.add_argument("--span-f1", action="store_true", default=None)
    p.add_argument("--name")
    p.add_argument("--out-dir")

    p = add("report", cmd_report, "combine eval reports into one table")
    p.add_argument("--inputs", action="append", metavar="NAME=REPORT.JSON")
    p.add_argument("--fmt", choices=("tsv", "markdown"))
    p.add_argument("--metrics", type=lambda s: s.split(","))
    p.add_argument("--out")

    p = add("serve", cmd_serve, "serve a model file over the scorer protocol")
    p.add_argument("--model")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--stdio", action="store_true", default=None)

    p = add("toygen", cmd_toygen, "write the synthetic bilingual toy corpus")
    p.add_argument("--out-dir")
    p.add_argument("--n-train", type=int)
    p.add_argument("--n-test", type=int)
    p.add_argument("--pivot-lang")
    p.add_argument("--embedded-lang")
    p.add_argument("--seed", type=int)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TransportError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (CodeswitchError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
