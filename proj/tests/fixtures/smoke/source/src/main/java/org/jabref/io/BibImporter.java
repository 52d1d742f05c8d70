package org.jabref.io;

import java.io.File;
import javax.xml.parsers.DocumentBuilder;

public class BibImporter {
    /* import java.util.Scanner; is not a real import */
    String note = "import fake.Thing;";
}
