"""
Report renderers.
Provides consistent output formatting for every pipeline.

Both renderers read the same ``Report.to_dict()`` payload, so the human
text and the machine document always carry identical facts.
"""
import json
from typing import Any, Dict, List

from app.constants import LOG_SECTION_SEPARATOR, LOG_SEPARATOR
from app.exceptions import ValidationError
from app.interfaces import ReportRenderer
from app.utils.formatting import format_duration, format_float
from app.validators import validate_output_format


class MachineRenderer(ReportRenderer):
    """JSON document with a stable field order (insertion order of to_dict)."""

    def render(self, report: Dict[str, Any]) -> str:
        return json.dumps(report, indent=2, ensure_ascii=False) + '\n'


class HumanRenderer(ReportRenderer):
    """Plain-text report for terminals."""

    def render(self, report: Dict[str, Any]) -> str:
        lines: List[str] = [
            LOG_SEPARATOR,
            f"{report['command']}: {report['problem']}",
            f"coordinates: {', '.join(report['coordinates'])}    seed: {report['seed']}",
        ]
        if report['sign_convention'] is not None:
            lines.append(f"sign convention: sigma = {report['sign_convention']:+d}")
        lines.append(LOG_SEPARATOR)

        if report['el_equations']:
            lines += self._section('Euler-Lagrange expressions')
            lines += [f"  E{i + 1} = {eq}" for i, eq in enumerate(report['el_equations'])]

        if report['generators']:
            lines += self._section(f"Symmetry generators ({len(report['generators'])})")
            for g in report['generators']:
                lines.append(f"  {g['name']}: zeta = {g['zeta']}")
                for coord, eta in zip(report['coordinates'], g['eta']):
                    lines.append(f"      eta[{coord}] = {eta}")
                lines.append(f"      G = {g['gauge']}")

        if report['charges']:
            lines += self._section(f"Conserved quantities ({len(report['charges'])})")
            for c in report['charges']:
                checks = f"off-shell {'ok' if c['offshell'] else 'FAILED'}"
                if 'numeric' in c:
                    checks += f", numeric {'ok' if c['numeric'] else 'EXCEEDS'}"
                lines.append(f"  {c['name']} = {c['expr']}    [{checks}]")

        if report['span_matches']:
            lines += self._section('Expected integrals')
            for m in report['span_matches']:
                if m['contained']:
                    combo = ' + '.join(f"({a})*{n}" for a, n in zip(m['coefficients'], m['basis']) if a != '0')
                    lines.append(f"  {m['name']}: matched  = {combo or '0'} + ({m['constant']})")
                else:
                    lines.append(f"  {m['name']}: NOT in span")

        if report['transform']:
            lines += self._section('Point transformation')
            for key, value in report['transform'].items():
                if key == 'checks':
                    continue
                lines.append(f"  {key}: {value}")
            for name, ok in report['transform'].get('checks', {}).items():
                lines.append(f"  check {name}: {'pass' if ok else 'FAIL'}")

        if report['drift']:
            lines += self._section('Numeric drift')
            for d in report['drift']:
                status = 'ok' if d['within_tolerance'] else 'EXCEEDS'
                lines.append(
                    f"  {d['name']} (state {d['state']}): abs {format_float(d['max_abs'])}  "
                    f"rel {format_float(d['max_rel'])}  [{status}]"
                )

        if report['warnings']:
            lines += self._section('Warnings')
            lines += [f"  - {w}" for w in report['warnings']]

        if 'timings' in report:
            lines += self._section('Timings')
            lines += [f"  {stage}: {format_duration(s)}" for stage, s in report['timings'].items()]

        lines.append(LOG_SEPARATOR)
        lines.append(f"verdict: {report['verdict'].upper()}")
        lines += [f"  - {f}" for f in report['failures']]
        return '\n'.join(lines) + '\n'

    @staticmethod
    def _section(title: str) -> List[str]:
        return ['', title, LOG_SECTION_SEPARATOR]


def get_renderer(output_format: str) -> ReportRenderer:
    """
    Pick the renderer for an output format.

    Args:
        output_format: 'human' or 'machine'

    Returns:
        Renderer instance

    Raises:
        ValidationError: unknown format
    """
    is_valid, error_msg = validate_output_format(output_format)
    if not is_valid:
        raise ValidationError('format', error_msg)
    renderers = {'human': HumanRenderer, 'machine': MachineRenderer}
    return renderers[output_format]()
