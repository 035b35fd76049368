"""Remote privacy protection: SMS command grammar, authentication, state machine.

A lost phone is commanded over plain SMS, with no account and no server:
``rpp <verb> <passphrase>``. The keyword must be the standalone first
token; verb and passphrase are case-insensitive; the passphrase is 1-100
characters of [a-z0-9] after folding. Anything not starting with the
standalone keyword is an ordinary text message.

Wire formats (bit-exact, see docs/formats.md):
    command   ``rpp`` WS verb WS passphrase, WS = one or more whitespace
              characters, matched end-to-end (no leading/trailing slack)
    locate reply   ``rpp-locate <lat %.6f> <lon %.6f> <ISO-8601 UTC>``
                   or ``rpp-locate unknown`` when the device has no fix

Folding rule: a character is accepted into a token if its ``str.lower()``
is an ASCII [a-z0-9] character, plus the three codepoints Python's
regex engine case-folds into that class (U+0130, U+0131 -> ``i``,
U+017F -> ``s``). Whitespace is ``str.isspace()``. Both rules are
property-tested to be exactly equivalent to ``re.IGNORECASE`` semantics
over the entire codepoint range.

The parse functions are pure; ``handle_inbound`` / ``local_unlock``
take and return protocol state and must be serialized by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum

from .device import Effect, GeoFix, LockDevice, SendSms, SmsMessage, StartRinger, WipeData
from .errors import ValidationError
from .secret import SecretRecord

KEYWORD = "rpp"
MAX_PASSPHRASE_LEN = 100

# After 5 consecutive authentication failures, protocol messages are
# ignored for 2**(failures-5) simulated minutes, capped at an hour. An
# SMS-guessable secret needs a throttle even though messages cost money.
BACKOFF_THRESHOLD = 5
BACKOFF_CAP_MINUTES = 60.0

_ASCII_TOKEN = frozenset("abcdefghijklmnopqrstuvwxyz0123456789")
# Codepoints the stdlib regex engine folds into [a-z0-9] although their
# str.lower() is not in the class: dotted/dotless I and long s.
_EXTRA_FOLDS = {"İ": "i", "ı": "i", "ſ": "s"}


class RppVerb(Enum):
    LOCK = "lock"
    RING = "ring"
    LOCATE = "locate"
    WIPE = "wipe"


# Wipe is destructive and the canonical command list is cautious about
# it, so it ships disabled until the owner opts in.
DEFAULT_ENABLED: frozenset[RppVerb] = frozenset({RppVerb.LOCK, RppVerb.RING, RppVerb.LOCATE})


class RppPhase(Enum):
    DISARMED = "Disarmed"
    ARMED = "Armed"
    AWAITING_NEW_PASSPHRASE = "AwaitingNewPassphrase"
    WIPED = "Wiped"


@dataclass(frozen=True)
class RppConfig:
    passphrase: SecretRecord
    previous_passphrase: SecretRecord | None = None
    enabled_commands: frozenset[RppVerb] = DEFAULT_ENABLED


@dataclass(frozen=True)
class RppState:
    phase: RppPhase = RppPhase.DISARMED
    failed_attempts: int = 0
    backoff_until: float | None = None


@dataclass(frozen=True)
class RppCommand:
    verb: RppVerb
    passphrase_token: str  # folded


@dataclass(frozen=True)
class NotRpp:
    pass


@dataclass(frozen=True)
class Malformed:
    reason: str


ParseResult = RppCommand | NotRpp | Malformed


def fold_char(ch: str) -> str | None:
    """Fold one character into [a-z0-9], or None if it is outside the class."""
    low = ch.lower()
    if len(low) == 1 and low in _ASCII_TOKEN:
        return low
    return _EXTRA_FOLDS.get(ch)


def fold_token(token: str) -> str | None:
    """Fold a whole token, or None if any character falls outside the class."""
    out: list[str] = []
    for ch in token:
        folded = fold_char(ch)
        if folded is None:
            return None
        out.append(folded)
    return "".join(out)


def _split_tokens(body: str) -> list[tuple[str, bool]]:
    """Alternating (chunk, is_whitespace) runs covering the whole body."""
    runs: list[tuple[str, bool]] = []
    start = 0
    current_ws: bool | None = None
    for i, ch in enumerate(body):
        ws = ch.isspace()
        if current_ws is None:
            current_ws = ws
        elif ws != current_ws:
            runs.append((body[start:i], current_ws))
            start, current_ws = i, ws
    if current_ws is not None:
        runs.append((body[start:], current_ws))
    return runs


def parse_command(body: str) -> ParseResult:
    """Recognize an SMS body against the command grammar.

    Returns ``NotRpp`` when the first token is not the keyword (ordinary
    message), ``Malformed`` when the keyword is present but the rest of
    the grammar is violated, and ``RppCommand`` on success.
    """
    runs = _split_tokens(body)
    if not runs or runs[0][1]:  # empty, or leading whitespace: keyword not at start
        return NotRpp()
    if fold_token(runs[0][0]) != KEYWORD:
        return NotRpp()
    # Runs alternate ws/non-ws, so a well-formed command is exactly
    # keyword, WS, verb, WS, passphrase - five runs, nothing after.
    if len(runs) != 5:
        return Malformed("expected 'rpp <verb> <passphrase>'")
    verb_token, passphrase_token = runs[2][0], runs[4][0]
    folded_verb = fold_token(verb_token)
    verb = next((v for v in RppVerb if v.value == folded_verb), None)
    if verb is None:
        return Malformed(f"unknown verb {verb_token!r}")
    folded_pass = fold_token(passphrase_token)
    if folded_pass is None:
        return Malformed("passphrase contains characters outside [a-z0-9]")
    if not 1 <= len(passphrase_token) <= MAX_PASSPHRASE_LEN:
        return Malformed(f"passphrase length outside [1, {MAX_PASSPHRASE_LEN}]")
    return RppCommand(verb=verb, passphrase_token=folded_pass)


def serialize_command(cmd: RppCommand) -> str:
    return f"{KEYWORD} {cmd.verb.value} {cmd.passphrase_token}"


def redact_body(body: str) -> str:
    """Mask credential material in a protocol message for display surfaces.

    Command SMS carry the passphrase in clear text by protocol design;
    the device transcript keeps the raw body, but anything the service
    hands out (status, events) shows the token masked. Near-miss bodies
    that start with the keyword are masked wholesale - a typo'd real
    passphrase is almost the real one.
    """
    parsed = parse_command(body)
    if isinstance(parsed, RppCommand):
        return f"{KEYWORD} {parsed.verb.value} ******"
    if isinstance(parsed, Malformed):
        return f"{KEYWORD} ******"
    return body


def validate_passphrase(new: str) -> str:
    """Fold and validate a candidate passphrase; returns the folded form."""
    folded = fold_token(new)
    if folded is None:
        raise ValidationError(
            "passphrase must use only letters and digits", field="passphrase", code="bad_charset"
        )
    if not 1 <= len(new) <= MAX_PASSPHRASE_LEN:
        raise ValidationError(
            f"passphrase length must be within [1, {MAX_PASSPHRASE_LEN}]",
            field="passphrase", code="out_of_range",
        )
    return folded


def set_passphrase(config: RppConfig | None, new: str) -> RppConfig:
    """First-time setup or rotation; rejects re-use of the current value."""
    folded = validate_passphrase(new)
    if config is not None:
        if config.passphrase.matches(folded):
            raise ValidationError(
                "new passphrase must differ from the current one",
                field="passphrase", code="repeat",
            )
        return RppConfig(
            passphrase=SecretRecord.create(folded),
            previous_passphrase=config.passphrase,
            enabled_commands=config.enabled_commands,
        )
    return RppConfig(passphrase=SecretRecord.create(folded))


def iso_utc(ts: float) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z")


def format_locate_report(fix: GeoFix | None, now: float) -> str:
    if fix is None:
        return "rpp-locate unknown"
    return f"rpp-locate {fix.lat:.6f} {fix.lon:.6f} {iso_utc(now)}"


def handle_inbound(
    state: RppState,
    config: RppConfig | None,
    msg: SmsMessage,
    fix: GeoFix | None,
    *,
    now: float,
) -> tuple[RppState, list[Effect]]:
    """Run one inbound SMS through the protocol.

    Every outcome is a value: ordinary messages, malformed commands,
    wrong passphrases and disabled verbs all return unchanged-or-counted
    state with zero effects. Only an authenticated, enabled verb
    produces effects. After a wipe the machine is terminal.
    """
    if state.phase is RppPhase.WIPED:
        return state, []
    parsed = parse_command(msg.body)
    if isinstance(parsed, NotRpp):
        return state, []
    if state.backoff_until is not None and now < state.backoff_until:
        return state, []  # throttle window: protocol traffic is ignored outright
    if isinstance(parsed, Malformed):
        return state, []
    if config is None:  # disarmed: nothing to authenticate against
        return state, []
    if not config.passphrase.matches(parsed.passphrase_token):
        return _count_failure(state, now=now), []
    state = replace(state, failed_attempts=0, backoff_until=None)
    if parsed.verb not in config.enabled_commands:
        return state, []
    if parsed.verb is RppVerb.LOCK:
        return state, [LockDevice()]
    if parsed.verb is RppVerb.LOCATE:
        # Reports the true position: recovery protects the owner, so
        # app-facing location policies do not apply here. Stays armed -
        # a moving phone keeps answering.
        return state, [SendSms(to=msg.sender, body=format_locate_report(fix, now)), LockDevice()]
    if parsed.verb is RppVerb.RING:
        return state, [LockDevice(), StartRinger(volume=100)]
    return replace(state, phase=RppPhase.WIPED), [WipeData()]  # WIPE


def local_unlock(
    state: RppState, config: RppConfig | None, entered: str, *, now: float
) -> tuple[RppState, bool]:
    """Owner enters the passphrase on the recovered device.

    Success unlocks and forces a rotation (phase AwaitingNewPassphrase);
    until the rotation happens, remote commands keep authenticating
    against the old passphrase.
    """
    if config is None or state.phase is RppPhase.WIPED:
        return state, False
    folded = fold_token(entered)
    if folded is not None and config.passphrase.matches(folded):
        return replace(state, phase=RppPhase.AWAITING_NEW_PASSPHRASE, failed_attempts=0, backoff_until=None), True
    return _count_failure(state, now=now), False


def _count_failure(state: RppState, *, now: float) -> RppState:
    failures = state.failed_attempts + 1
    backoff = state.backoff_until
    if failures >= BACKOFF_THRESHOLD:
        minutes = min(2.0 ** (failures - BACKOFF_THRESHOLD), BACKOFF_CAP_MINUTES)
        backoff = now + minutes * 60.0
    return replace(state, failed_attempts=failures, backoff_until=backoff)
