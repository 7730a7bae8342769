"""Tests for figure rendering against the documented CSV schemas."""

import json
from pathlib import Path

import pytest

from entpart_figures import FigureSpec, RenderError, build_figure, render
from entpart_figures.cli import main as cli_main

PNG_MAGIC = b"\x89PNG"


def write_csv(path: Path, kind: str, columns: str, rows: list[str]) -> Path:
    header = json.dumps({"schema": "entpart-results/1", "kind": kind, "config_hash": "deadbeef"})
    path.write_text(f"# entpart-results/1 {header}\n{columns}\n" + "\n".join(rows) + "\n")
    return path


@pytest.fixture
def score_t_csv(tmp_path):
    rows = [f"{t},{s}" for t, s in [(2, 0.97), (4, 0.9), (6, 0.8), (8, 0.66), (10, 0.5)]]
    return write_csv(tmp_path / "score_vs_t.csv", "score-vs-t", "t,score", rows)


@pytest.fixture
def score_k_csv(tmp_path):
    rows = []
    for k in (1, 2, 3):
        rows.append(f"6,{k},exclusive,{0.3 + 0.2 * k}")
        rows.append(f"6,{k},cumulative,{0.4 + 0.2 * k}")
    return write_csv(tmp_path / "score_vs_k.csv", "score-vs-k", "n_qubits,k,mode,score", rows)


@pytest.fixture
def embedding_csv(tmp_path):
    rows = [
        '0,"[[1,2,3]]","[3]",train,0.0,0.1',
        '1,"[[1,2,3]]","[3]",train,0.2,0.0',
        '2,"[[1],[2,3]]","[1,2]",train,5.0,5.2',
        '3,"[[1],[2,3]]","[1,2]",test,5.1,5.0',
        '4,"[[1],[2],[3]]","[1,1,1]",train,-4.0,2.0',
        '5,"[[1],[2],[3]]","[1,1,1]",test,-4.2,2.1',
    ]
    return write_csv(
        tmp_path / "embedding.csv", "embedding-scatter", "state_id,partition,shape,role,y1,y2", rows
    )


@pytest.fixture
def transition_csv(tmp_path):
    rows = [
        "0,1.0,0.9,1,0,0.0,0.0",
        "0.25,0.6,0.5,1,0,1.0,0.5",
        "0.5,0.4,0.1,1,0,2.0,1.0",
        "0.75,0.2,0,0,0,3.0,1.5",
        "1,0.0625,0,0,0,4.0,2.0",
        "1,0.0625,0,0,1,4.1,2.1",
    ]
    return write_csv(
        tmp_path / "transition.csv",
        "transition",
        "lambda,purity,part_logneg,is_npt,is_max_mixed,y1,y2",
        rows,
    )


class TestRenderKinds:
    def test_score_vs_t_line_has_all_points(self, score_t_csv, tmp_path):
        spec = FigureSpec.from_dict({"kind": "score-vs-t", "csv": str(score_t_csv), "out": str(tmp_path / "t.png")})
        built = build_figure(spec)
        line = built.figure.axes[0].lines[0]
        assert len(line.get_xdata()) == 5
        out = render(spec)
        assert Path(out).read_bytes()[:4] == PNG_MAGIC

    def test_score_vs_k_modes_drawn(self, score_k_csv, tmp_path):
        spec = FigureSpec.from_dict({"kind": "score-vs-k", "csv": [str(score_k_csv)], "out": str(tmp_path / "k.png")})
        built = build_figure(spec)
        assert sorted(built.legend_labels) == ["N=6 cumulative", "N=6 exclusive"]
        render(spec)

    def test_embedding_legend_matches_labels(self, embedding_csv, tmp_path):
        spec = FigureSpec.from_dict(
            {"kind": "embedding-scatter", "csv": str(embedding_csv), "out": str(tmp_path / "e.png")}
        )
        built = build_figure(spec)
        assert len(built.legend_labels) == 3  # three distinct partitions
        legend = built.figure.axes[0].get_legend()
        assert len(legend.get_texts()) == 3
        render(spec)

    def test_embedding_color_key_shape(self, embedding_csv, tmp_path):
        spec = FigureSpec.from_dict(
            {
                "kind": "embedding-scatter",
                "csv": str(embedding_csv),
                "out": str(tmp_path / "e2.png"),
                "color_key": "shape",
            }
        )
        built = build_figure(spec)
        assert len(built.legend_labels) == 3

    def test_transition_black_rows_exactly_ppt(self, transition_csv, tmp_path):
        spec = FigureSpec.from_dict(
            {
                "kind": "transition-serpentine",
                "csv": str(transition_csv),
                "out": str(tmp_path / "tr.png"),
                "color_key": "purity",
            }
        )
        built = build_figure(spec)
        assert built.row_colors[3] == "black" and built.row_colors[4] == "black"
        assert built.row_colors[5] == "red"  # flagged maximally mixed row
        assert all(c not in ("black", "red") for c in built.row_colors[:3])
        render(spec)


class TestDeterminism:
    def test_identical_csv_identical_bytes(self, transition_csv, tmp_path):
        outs = []
        for name in ("one.png", "two.png"):
            spec = FigureSpec.from_dict(
                {"kind": "transition-serpentine", "csv": str(transition_csv), "out": str(tmp_path / name)}
            )
            outs.append(Path(render(spec)).read_bytes())
        assert outs[0] == outs[1]


class TestSchemaValidation:
    def test_missing_column_is_diagnosed(self, tmp_path):
        bad = write_csv(tmp_path / "bad.csv", "score-vs-t", "t,value", ["2,0.9"])
        spec = FigureSpec.from_dict({"kind": "score-vs-t", "csv": str(bad), "out": str(tmp_path / "o.png")})
        with pytest.raises(RenderError) as err:
            build_figure(spec)
        assert "score" in str(err.value) and "missing" in str(err.value)

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(RenderError):
            FigureSpec.from_dict({"kind": "pie", "csv": "x.csv", "out": "o.png"})

    def test_bad_color_key_rejected(self, tmp_path):
        with pytest.raises(RenderError):
            FigureSpec.from_dict(
                {
                    "kind": "transition-serpentine",
                    "csv": "x.csv",
                    "out": "o.png",
                    "color_key": "partition",
                }
            )

    def test_ragged_row_rejected(self, tmp_path):
        bad = write_csv(tmp_path / "bad.csv", "score-vs-t", "t,score", ["2,0.9", "4"])
        spec = FigureSpec.from_dict({"kind": "score-vs-t", "csv": str(bad), "out": str(tmp_path / "o.png")})
        with pytest.raises(RenderError):
            build_figure(spec)


class TestCli:
    def test_inline_spec(self, score_t_csv, tmp_path):
        out = tmp_path / "cli.png"
        payload = json.dumps({"kind": "score-vs-t", "csv": str(score_t_csv), "out": str(out)})
        assert cli_main(["render", "--spec", payload]) == 0
        assert out.exists()

    def test_spec_file(self, score_t_csv, tmp_path):
        out = tmp_path / "cli2.png"
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps({"kind": "score-vs-t", "csv": str(score_t_csv), "out": str(out)}))
        assert cli_main(["render", "--spec", str(spec_path)]) == 0

    def test_schema_mismatch_exit_code(self, tmp_path):
        bad = write_csv(tmp_path / "bad.csv", "score-vs-t", "t,value", ["2,0.9"])
        payload = json.dumps({"kind": "score-vs-t", "csv": str(bad), "out": str(tmp_path / "o.png")})
        assert cli_main(["render", "--spec", payload]) == 2

    def test_missing_csv_exit_code(self, tmp_path):
        payload = json.dumps(
            {"kind": "score-vs-t", "csv": str(tmp_path / "nope.csv"), "out": str(tmp_path / "o.png")}
        )
        assert cli_main(["render", "--spec", payload]) == 3
