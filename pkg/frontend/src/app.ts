import { ApiClient, ApiError, OfflineError } from "./api.js";
import {
  renderAdminDashboard,
  renderErrorBanner,
  renderProfileSummary,
  renderResults,
  renderSurveyForm,
} from "./views.js";
import type { Profile, ScanResponse } from "./types.js";
import { FIXTURE_IMAGES, UPLOAD_SPACE } from "./types.js";

export type Screen = "login" | "scan" | "results" | "profile" | "survey" | "admin";

const CONDITIONS = ["diabetes-type-1", "diabetes-type-2", "hypertension", "none"];

/**
 * Single-page controller. All state is in-memory: the session token never
 * leaves the ApiClient, and nothing is written to browser storage.
 */
export class App {
  screen: Screen = "login";
  profile: Profile | null = null;
  lastScan: ScanResponse | null = null;
  private scanAbort: AbortController | null = null;

  constructor(
    private readonly root: HTMLElement,
    readonly api: ApiClient,
    private readonly doc: Document = root.ownerDocument,
  ) {}

  render(): void {
    this.root.textContent = "";
    const nav = this.doc.createElement("nav");
    nav.className = "topnav";
    if (this.api.authenticated) {
      for (const target of ["scan", "profile", "survey"] as Screen[]) {
        nav.appendChild(this.navButton(target));
      }
      if (this.profile?.is_admin) nav.appendChild(this.navButton("admin"));
      const logout = this.doc.createElement("button");
      logout.className = "nav-logout";
      logout.textContent = "Sign out";
      logout.addEventListener("click", () => {
        this.api.logout();
        this.profile = null;
        this.lastScan = null;
        this.show("login");
      });
      nav.appendChild(logout);
    }
    this.root.appendChild(nav);

    const main = this.doc.createElement("main");
    main.className = `screen screen-${this.screen}`;
    this.root.appendChild(main);
    switch (this.screen) {
      case "login":
        this.renderLogin(main);
        break;
      case "scan":
        this.renderScan(main);
        break;
      case "results":
        this.renderResultsScreen(main);
        break;
      case "profile":
        this.renderProfile(main);
        break;
      case "survey":
        this.renderSurvey(main);
        break;
      case "admin":
        this.renderAdmin(main);
        break;
    }
  }

  show(screen: Screen): void {
    this.screen = screen;
    this.render();
  }

  private navButton(target: Screen): HTMLButtonElement {
    const btn = this.doc.createElement("button");
    btn.className = `nav-${target}`;
    btn.textContent = target;
    btn.addEventListener("click", () => {
      void this.goto(target);
    });
    return btn;
  }

  private async goto(target: Screen): Promise<void> {
    this.show(target);
  }

  private fail(container: HTMLElement, err: unknown, onRetry?: () => void): void {
    let message = "Something went wrong.";
    let retriable = false;
    if (err instanceof ApiError) {
      message = err.message;
      retriable = err.retriable;
    } else if (err instanceof OfflineError) {
      message = "The service is unreachable.";
      retriable = true;
    }
    container.prepend(renderErrorBanner(this.doc, message, retriable, onRetry));
  }

  // -- login ---------------------------------------------------------------

  private renderLogin(main: HTMLElement): void {
    const form = this.doc.createElement("form");
    form.className = "login-form";
    form.innerHTML = `
      <h1>dietwise</h1>
      <input class="login-name" name="name" placeholder="name" autocomplete="username">
      <input class="login-secret" name="secret" type="password" placeholder="secret"
             autocomplete="current-password">
      <label class="login-condition">Condition (new accounts)
        <select class="login-condition-select">
          ${CONDITIONS.map((c) => `<option value="${c}">${c}</option>`).join("")}
        </select>
      </label>
      <button type="submit" class="login-submit">Sign in</button>
      <button type="button" class="login-register">Create account</button>
    `;
    const name = form.querySelector<HTMLInputElement>(".login-name")!;
    const secret = form.querySelector<HTMLInputElement>(".login-secret")!;
    const condition = form.querySelector<HTMLSelectElement>(".login-condition-select")!;

    const signIn = async () => {
      try {
        await this.api.login(name.value, secret.value);
        this.profile = await this.api.getProfile();
        this.show("scan");
      } catch (err) {
        this.fail(main, err, () => void signIn());
      }
    };
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void signIn();
    });
    form.querySelector(".login-register")!.addEventListener("click", () => {
      void (async () => {
        try {
          await this.api.register({
            name: name.value,
            secret: secret.value,
            conditions: condition.value === "none" ? [] : [condition.value],
          });
          await signIn();
        } catch (err) {
          this.fail(main, err);
        }
      })();
    });
    main.appendChild(form);
  }

  // -- scan ----------------------------------------------------------------

  private renderScan(main: HTMLElement): void {
    const form = this.doc.createElement("form");
    form.className = "scan-form";
    const options = FIXTURE_IMAGES.map(
      (f) => `<option value="${f.id}">${f.title}</option>`,
    ).join("");
    form.innerHTML = `
      <h2>Scan a meal</h2>
      <label>Demo photo
        <select class="scan-fixture"><option value="">(upload instead)</option>${options}</select>
      </label>
      <label>Or upload <input class="scan-file" type="file" accept="image/*"></label>
      <label>What should I look for?
        <input class="scan-prompts" placeholder="pizza, carrot">
      </label>
      <button type="submit" class="scan-submit">Scan</button>
    `;
    const fixture = form.querySelector<HTMLSelectElement>(".scan-fixture")!;
    const file = form.querySelector<HTMLInputElement>(".scan-file")!;
    const promptField = form.querySelector<HTMLInputElement>(".scan-prompts")!;

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const prompts = promptField.value
        .split(",")
        .map((p) => p.trim())
        .filter((p) => p.length > 0);
      void this.runScan(main, fixture.value, file.files?.[0] ?? null, prompts);
    });
    main.appendChild(form);
  }

  async runScan(
    main: HTMLElement,
    fixtureValue: string,
    upload: File | null,
    prompts: string[],
  ): Promise<void> {
    // A newer scan cancels any still-running one.
    this.scanAbort?.abort();
    const abort = new AbortController();
    this.scanAbort = abort;
    try {
      let scan: ScanResponse;
      if (fixtureValue !== "") {
        scan = await this.api.scan(
          { fixture_image_id: Number(fixtureValue), prompts },
          abort.signal,
        );
        this.lastScanNatural = FIXTURE_IMAGES.find(
          (f) => f.id === Number(fixtureValue),
        ) ?? UPLOAD_SPACE;
        this.lastScanUrl = undefined;
      } else if (upload) {
        const image_b64 = await fileToBase64(upload);
        scan = await this.api.scan({ image_b64, prompts }, abort.signal);
        this.lastScanNatural = UPLOAD_SPACE;
        this.lastScanUrl = URL.createObjectURL(upload);
      } else {
        this.fail(main, new ApiError(400, {
          code: "validation",
          message: "Pick a demo photo or upload one.",
          retriable: false,
        }));
        return;
      }
      if (abort.signal.aborted) return;
      this.lastScan = scan;
      this.show("results");
    } catch (err) {
      if (abort.signal.aborted) return;
      this.fail(main, err, () => void this.runScan(main, fixtureValue, upload, prompts));
    }
  }

  private lastScanNatural: { width: number; height: number } = UPLOAD_SPACE;
  private lastScanUrl: string | undefined;

  private renderResultsScreen(main: HTMLElement): void {
    if (!this.lastScan) {
      this.show("scan");
      return;
    }
    // Display at natural size; overlay scaling is exercised by resize.
    main.appendChild(
      renderResults(
        this.doc,
        this.lastScan,
        this.lastScanNatural,
        this.lastScanNatural,
        this.lastScanUrl,
      ),
    );
    const back = this.doc.createElement("button");
    back.className = "back-to-scan";
    back.textContent = "Scan another";
    back.addEventListener("click", () => this.show("scan"));
    main.appendChild(back);
  }

  // -- profile ---------------------------------------------------------------

  private renderProfile(main: HTMLElement): void {
    void (async () => {
      try {
        this.profile = await this.api.getProfile();
      } catch (err) {
        this.fail(main, err);
        return;
      }
      main.appendChild(renderProfileSummary(this.doc, this.profile));
      const form = this.doc.createElement("form");
      form.className = "profile-form";
      form.innerHTML = `
        <label>Conditions (comma separated)
          <input class="profile-conditions" value="${this.profile.conditions.join(", ")}">
        </label>
        <label>Restrictions
          <input class="profile-restrictions" value="${this.profile.restrictions.join(", ")}">
        </label>
        <label>Goals
          <input class="profile-goals" value="${this.profile.goals.join(", ")}">
        </label>
        <button type="submit" class="profile-save">Save</button>
      `;
      form.addEventListener("submit", (event) => {
        event.preventDefault();
        const read = (selector: string) =>
          form
            .querySelector<HTMLInputElement>(selector)!
            .value.split(",")
            .map((v) => v.trim())
            .filter((v) => v.length > 0);
        void (async () => {
          try {
            this.profile = await this.api.updateProfile({
              conditions: read(".profile-conditions"),
              restrictions: read(".profile-restrictions"),
              goals: read(".profile-goals"),
            });
            this.show("profile");
          } catch (err) {
            this.fail(main, err);
          }
        })();
      });
      main.appendChild(form);
    })();
  }

  // -- survey ----------------------------------------------------------------

  private renderSurvey(main: HTMLElement): void {
    main.appendChild(
      renderSurveyForm(this.doc, (responses) => {
        void (async () => {
          try {
            await this.api.submitSurvey(responses);
            const toast = this.doc.createElement("p");
            toast.className = "survey-toast";
            toast.textContent = "Thanks — feedback recorded.";
            main.appendChild(toast);
          } catch (err) {
            this.fail(main, err);
          }
        })();
      }),
    );
  }

  // -- admin -----------------------------------------------------------------

  private renderAdmin(main: HTMLElement): void {
    void (async () => {
      try {
        const summary = await this.api.surveySummary();
        main.appendChild(renderAdminDashboard(this.doc, summary));
      } catch (err) {
        this.fail(main, err);
      }
    })();
  }
}

async function fileToBase64(file: File): Promise<string> {
  const buf = new Uint8Array(await file.arrayBuffer());
  let binary = "";
  for (const byte of buf) binary += String.fromCharCode(byte);
  return btoa(binary);
}
