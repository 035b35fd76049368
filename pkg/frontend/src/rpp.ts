/**
 * Remote-protection console: arm/rotate the passphrase (write-only
 * password fields, cleared after submit), choose enabled commands, and
 * a simulate-SMS box that posts to the device and shows the effects.
 */

import { ApiClient, RppStatus } from "./api.js";
import { el, replaceChildrenOf } from "./dom.js";

export const ALL_COMMANDS = ["lock", "ring", "locate", "wipe"] as const;

export function renderRppStatus(status: RppStatus): HTMLElement {
  return el("dl", { class: "rpp-status" }, [
    el("dt", {}, ["armed"]),
    el("dd", { id: "rpp-armed" }, [status.armed ? "yes" : "no"]),
    el("dt", {}, ["phase"]),
    el("dd", { id: "rpp-phase" }, [status.phase]),
    el("dt", {}, ["failed attempts"]),
    el("dd", { id: "rpp-failed" }, [String(status.failed_attempts)]),
  ]);
}

export function mountRpp(root: HTMLElement, client: ApiClient, onChanged: () => void): { refresh: () => Promise<void> } {
  const container = el("div", { class: "rpp-panel" });
  root.append(container);
  // survive re-renders: results stay visible after the panel refreshes
  const message = el("p", { class: "warnings", id: "rpp-message" });
  const effectsOut = el("ul", { class: "sms-effects", id: "sms-effects" });

  async function refresh(): Promise<void> {
    render(await client.getRpp());
  }

  function render(status: RppStatus): void {
    const passphrase = el("input", {
      type: "password", id: "rpp-passphrase", placeholder: status.armed ? "new passphrase" : "create passphrase",
      autocomplete: "off",
    });
    const armButton = el("button", {
      id: "rpp-arm",
      onclick: () => {
        void (async () => {
          try {
            await client.setPassphrase(passphrase.value);
            passphrase.value = ""; // write-only: never kept or re-shown
            message.textContent = status.armed ? "passphrase rotated" : "protection armed";
            await refresh();
            onChanged();
          } catch (error) {
            message.textContent = String(error);
          }
        })();
      },
    }, [status.armed ? "Rotate passphrase" : "Arm protection"]);

    const checkboxes = ALL_COMMANDS.map((command) => {
      const box = el("input", { type: "checkbox", id: `rpp-cmd-${command}`, "data-command": command });
      box.checked = status.enabled_commands.includes(command);
      box.addEventListener("change", () => {
        void (async () => {
          const enabled = checkboxes.filter((b) => b.checked).map((b) => b.dataset.command as string);
          try {
            await client.putRppEnabled(enabled);
            message.textContent = `enabled: ${enabled.join(", ") || "none"}`;
            onChanged();
          } catch (error) {
            box.checked = !box.checked; // server refused: roll the view back
            message.textContent = String(error);
          }
        })();
      });
      return box;
    });
    const commandRow = el(
      "div",
      { class: "rpp-commands" },
      checkboxes.flatMap((box, i) => [box, el("label", { for: box.id }, [ALL_COMMANDS[i]])]),
    );

    const smsFrom = el("input", { type: "text", id: "sms-from", value: "+15550001234", placeholder: "from number" });
    const smsBody = el("input", { type: "text", id: "sms-body", placeholder: "rpp ring <passphrase>" });
    const smsSend = el("button", {
      id: "sms-send",
      onclick: () => {
        void (async () => {
          try {
            const result = await client.sendSms(smsFrom.value, smsBody.value);
            replaceChildrenOf(
              effectsOut,
              result.effects.length
                ? result.effects.map((name) => el("li", { class: "effect" }, [name]))
                : [el("li", { class: "effect none" }, ["no effects (stored as ordinary SMS)"])],
            );
            await refresh();
            onChanged();
          } catch (error) {
            message.textContent = String(error);
          }
        })();
      },
    }, ["Deliver SMS"]);

    const unlockPass = el("input", { type: "password", id: "unlock-passphrase", placeholder: "passphrase", autocomplete: "off" });
    const unlockButton = el("button", {
      id: "unlock-button",
      onclick: () => {
        void (async () => {
          try {
            const result = await client.unlock(unlockPass.value);
            unlockPass.value = "";
            message.textContent = result.unlocked
              ? "unlocked - choose a new passphrase to re-arm"
              : "wrong passphrase";
            await refresh();
            onChanged();
          } catch (error) {
            message.textContent = String(error);
          }
        })();
      },
    }, ["Unlock device"]);

    replaceChildrenOf(container, [
      el("h2", {}, ["Remote privacy protection"]),
      renderRppStatus(status),
      el("div", { class: "rpp-arm-row" }, [passphrase, armButton]),
      el("h3", {}, ["Enabled commands"]),
      commandRow,
      el("h3", {}, ["Simulate an incoming SMS"]),
      el("div", { class: "sms-box" }, [smsFrom, smsBody, smsSend]),
      effectsOut,
      el("h3", {}, ["On-device lock screen"]),
      el("div", { class: "unlock-row" }, [unlockPass, unlockButton]),
      message,
    ]);
  }

  return { refresh };
}
