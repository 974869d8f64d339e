// Spawns the real project service for integration tests and tears it down.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface ServiceHandle {
  baseUrl: string;
  dataDir: string;
  stop: () => void;
  readProjectFile: (projectId: string, name: string) => string;
}

export async function startService(): Promise<ServiceHandle> {
  const dataDir = mkdtempSync(join(tmpdir(), "infoweave-editor-test-"));
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "infoweave.cli", "serve", "--host", "127.0.0.1", "--port", "0", "--data-dir", dataDir],
    { stdio: ["ignore", "pipe", "pipe"] },
  );

  const port = await new Promise<number>((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(() => reject(new Error(`service did not start: ${buffer}`)), 30_000);
    child.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/SERVICE_LISTENING host=\S+ port=(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(Number.parseInt(match[1], 10));
      }
    });
    child.stderr!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
    });
    child.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`service exited early (code ${code}): ${buffer}`));
    });
  });

  const baseUrl = `http://127.0.0.1:${port}`;
  // The banner prints before uvicorn binds; poll until it answers.
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      await fetch(`${baseUrl}/projects/probe/storyframe`);
      break;
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }

  return {
    baseUrl,
    dataDir,
    stop: () => child.kill("SIGTERM"),
    readProjectFile: (projectId: string, name: string) =>
      readFileSync(join(dataDir, projectId, name), "utf-8"),
  };
}

export const TITANIC_GOAL = "What factors influenced the survival rate on the Titanic?";

export const TITANIC_TEXT = `The RMS Titanic struck an iceberg on the night of April 14 and sank in the
early hours of the next morning. The ship carried more than 2200 people on
her maiden voyage, and the sinking became one of the deadliest peacetime
maritime disasters in history.

Gender strongly influenced the survival rate during the evacuation. 339
women survived out of 466 on board. Crews enforced the women-and-children
order at most lifeboat stations, so women survived at far higher rates than
men across every class.

Passenger class also shaped survival on the ship. 61.9% of first class
passengers survived the sinking. In contrast, third class passengers had far
less access to the boat deck and only about 25.4% of them survived.

Age played a part in survival as well, because children were given priority
seats in the lifeboats. About 1 in 10 passengers were children. Just over
half of the children aboard survived the disaster.`;
