/**
 * Typed client for the privdash HTTP API.
 *
 * Every view renders from these responses alone - the client holds no
 * state of its own beyond the event cursor its caller keeps. Secrets the
 * user types are registered here and every response is checked against
 * them: the server must never echo one back.
 */

export interface Policy {
  mode: "off" | "precise" | "fixed" | "blur";
  lat?: number;
  lon?: number;
  grid_km?: number;
}

export interface LocationSettings {
  global_default: Policy;
  exceptions: Record<string, Policy>;
}

export interface AppInfo {
  app_id: string;
  display_name: string;
  system_flag: boolean;
}

export interface PlaceInfo {
  name: string;
  lat: number;
  lon: number;
  kind: string;
}

export interface TourPanel {
  panel_id: string;
  topic: string;
  title: string;
  body: string;
  illustration_ref: string;
  order: number;
}

export interface RppStatus {
  armed: boolean;
  phase: string;
  enabled_commands: string[];
  failed_attempts: number;
  backoff_until: number | null;
}

export interface ReportedLocation {
  lat: number | null;
  lon: number | null;
  timestamp: number;
}

export interface DeviceStatus {
  lock: string;
  ringer: { volume: number; ringing: boolean };
  position: { lat: number; lon: number; timestamp: number } | null;
  clock: number;
  resources: Record<string, boolean>;
  guest_session: { profile_id: string; entered_at: number } | null;
  inbound_sms: { sender: string; body: string; received_at: number }[];
  outbound_sms: { to: string; body: string; sent_at: number }[];
  rpp: RppStatus;
}

export interface GuestProfile {
  profile_id: string;
  name: string;
  visible_apps: string[];
  protected_stores: string[];
  resource_overrides: Record<string, boolean>;
}

export interface GuestView {
  apps: AppInfo[];
  stores: Record<string, object[]>;
  resources: Record<string, boolean>;
  session_active: boolean;
  profile_id: string | null;
}

export interface Destination {
  dest_id: string;
  kind: string;
  name: string;
  endpoint?: string;
  path?: string;
}

export interface BackupResult {
  destination_id: string;
  key: string;
  checksum: string;
  manifest: { created_at: number; stores: { kind: string; count: number }[] };
}

export interface EventRecord {
  seq: number;
  timestamp: number;
  kind: string;
  detail: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public field?: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  private secrets: string[] = [];

  constructor(public base: string = "") {}

  /** Remember a user-typed secret so responses can be checked for leaks. */
  registerSecret(value: string): void {
    if (value && !this.secrets.includes(value)) this.secrets.push(value);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.base}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    if (!response.ok) {
      let code = String(response.status);
      let message = text;
      let field: string | undefined;
      try {
        const parsed = JSON.parse(text);
        code = parsed.error?.code ?? code;
        message = parsed.error?.message ?? message;
        field = parsed.error?.field;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, code, message, field);
    }
    for (const secret of this.secrets) {
      if (text.includes(secret)) {
        throw new ApiError(500, "secret-leak", "response echoed a registered secret");
      }
    }
    return JSON.parse(text) as T;
  }

  // tour
  getTour(topic?: string): Promise<{ panels: TourPanel[] }> {
    const suffix = topic ? `?topic=${encodeURIComponent(topic)}` : "";
    return this.request("GET", `/api/tour${suffix}`);
  }

  // location
  getLocationSettings(): Promise<LocationSettings> {
    return this.request("GET", "/api/settings/location");
  }
  putLocationSettings(settings: LocationSettings): Promise<{ ok: boolean; warnings: string[] }> {
    return this.request("PUT", "/api/settings/location", settings);
  }
  queryLocation(appId: string): Promise<ReportedLocation> {
    return this.request("GET", `/api/location/query?app=${encodeURIComponent(appId)}`);
  }
  getApps(query = ""): Promise<{ apps: AppInfo[] }> {
    const suffix = query ? `?q=${encodeURIComponent(query)}` : "";
    return this.request("GET", `/api/apps${suffix}`);
  }
  getPlaces(query: string): Promise<{ places: PlaceInfo[] }> {
    return this.request("GET", `/api/places?q=${encodeURIComponent(query)}`);
  }

  // remote protection
  getRpp(): Promise<RppStatus> {
    return this.request("GET", "/api/settings/rpp");
  }
  putRppEnabled(commands: string[]): Promise<RppStatus> {
    return this.request("PUT", "/api/settings/rpp", { enabled_commands: commands });
  }
  setPassphrase(passphrase: string): Promise<RppStatus> {
    this.registerSecret(passphrase);
    return this.request("POST", "/api/rpp/passphrase", { passphrase });
  }
  setOwnerPin(pin: string): Promise<{ ok: boolean }> {
    this.registerSecret(pin);
    return this.request("POST", "/api/settings/owner-pin", { pin });
  }
  sendSms(from: string, body: string): Promise<{ stored: boolean; effects: string[] }> {
    return this.request("POST", "/api/device/sms", { from, body });
  }
  unlock(passphrase: string): Promise<{ unlocked: boolean; lock: string; rpp: RppStatus }> {
    this.registerSecret(passphrase);
    return this.request("POST", "/api/device/unlock", { passphrase });
  }

  // device
  getStatus(): Promise<DeviceStatus> {
    return this.request("GET", "/api/device/status");
  }
  setPosition(lat: number, lon: number, timestamp?: number): Promise<{ ok: boolean }> {
    return this.request("PUT", "/api/device/position", { lat, lon, timestamp });
  }

  // guest
  getGuestView(): Promise<GuestView> {
    return this.request("GET", "/api/guest/view");
  }
  getProfiles(): Promise<{ profiles: GuestProfile[] }> {
    return this.request("GET", "/api/guest/profiles");
  }
  createProfile(profile: GuestProfile): Promise<{ profile: GuestProfile; warnings: string[] }> {
    return this.request("POST", "/api/guest/profiles", profile);
  }
  deleteProfile(profileId: string): Promise<{ ok: boolean }> {
    return this.request("DELETE", `/api/guest/profiles/${encodeURIComponent(profileId)}`);
  }
  guestEnter(profileId: string, auth: string): Promise<GuestView> {
    this.registerSecret(auth);
    return this.request("POST", "/api/guest/enter", { profile_id: profileId, auth });
  }
  guestExit(auth: string): Promise<GuestView> {
    this.registerSecret(auth);
    return this.request("POST", "/api/guest/exit", { auth });
  }

  // backup
  getDestinations(): Promise<{ destinations: Destination[] }> {
    return this.request("GET", "/api/backup/destinations");
  }
  addDestination(dest: Destination): Promise<{ destinations: Destination[] }> {
    return this.request("POST", "/api/backup/destinations", dest);
  }
  removeDestination(destId: string): Promise<{ destinations: Destination[] }> {
    return this.request("DELETE", `/api/backup/destinations/${encodeURIComponent(destId)}`);
  }
  createBackup(stores: string[] | "all", destinationId: string): Promise<BackupResult> {
    return this.request("POST", "/api/backup", { stores, destination_id: destinationId });
  }
  listArchives(destId: string): Promise<{ keys: string[] }> {
    return this.request("GET", `/blobstore/${encodeURIComponent(destId)}`);
  }
  restore(args: { auth: string } & ({ destination_id: string; key: string } | { path: string })): Promise<{
    ok: boolean;
    restored: string[];
  }> {
    this.registerSecret(args.auth);
    return this.request("POST", "/api/restore", args);
  }

  // events, export/import
  getEvents(since: number): Promise<{ events: EventRecord[]; latest: number }> {
    return this.request("GET", `/api/events?since=${since}`);
  }
  exportSettings(): Promise<Record<string, unknown>> {
    return this.request("GET", "/api/settings/export");
  }
  importSettings(blob: Record<string, unknown>): Promise<{ ok: boolean; warnings: string[] }> {
    return this.request("POST", "/api/settings/import", blob);
  }
}
